//! Wire format.
//!
//! ```text
//! "FSTY" | 0x01 | cipher parameter (8, big endian) | nonce (12)
//!        | 28 bootstrap tags (2 each, little endian)
//!        | blocks: tag (2, little endian) | ciphertext (64, last block 1..=64)
//! ```
//!
//! There is no length field; every block but the last carries a full 64
//! bytes, so block boundaries follow from the frame length. A trailing
//! fragment of one or two bytes (a tag with no body) is rejected.

use std::io::Read;

use crate::error::{Error, Result};
use crate::hash::HaltTag;
use crate::init::{InitHashes, INIT_HASHES_LEN};
use crate::state::{CipherParameter, Nonce, BLOCK_LEN, NONCE_LEN};

pub const MAGIC: [u8; 4] = *b"FSTY";
pub const VERSION: u8 = 0x01;
pub const TAG_LEN: usize = 2;
pub const HEADER_LEN: usize = MAGIC.len() + 1 + 8 + NONCE_LEN + INIT_HASHES_LEN;
pub const FRAMED_BLOCK_LEN: usize = TAG_LEN + BLOCK_LEN;
/// Magic, version and nonce: framing a plain ChaCha message would need
/// these too, so they are not counted as cipher overhead.
pub const ENVELOPE_LEN: usize = MAGIC.len() + 1 + NONCE_LEN;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FrameHeader {
    pub parameter: CipherParameter,
    pub nonce: Nonce,
    pub boot: InitHashes,
}

impl FrameHeader {
    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[..4].copy_from_slice(&MAGIC);
        out[4] = VERSION;
        out[5..13].copy_from_slice(&self.parameter.pack().to_be_bytes());
        out[13..25].copy_from_slice(&self.nonce.0);
        out[25..].copy_from_slice(&self.boot.to_bytes());
        out
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::MalformedFrame(format!(
                "header needs {HEADER_LEN} bytes, got {}",
                bytes.len()
            )));
        }
        if bytes[..4] != MAGIC {
            return Err(Error::MalformedFrame("bad magic".into()));
        }
        if bytes[4] != VERSION {
            return Err(Error::MalformedFrame(format!(
                "unsupported version {:#04x}",
                bytes[4]
            )));
        }
        let packed = u64::from_be_bytes(bytes[5..13].try_into().expect("8 bytes"));
        let parameter = CipherParameter::unpack(packed)
            .map_err(|e| Error::MalformedFrame(format!("header parameter {packed:#018x}: {e}")))?;
        let nonce = Nonce(bytes[13..25].try_into().expect("12 bytes"));
        let boot = InitHashes::from_bytes(bytes[25..HEADER_LEN].try_into().expect("56 bytes"));
        Ok(Self {
            parameter,
            nonce,
            boot,
        })
    }

    pub fn read_from<R: Read>(reader: &mut R) -> Result<Self> {
        let mut buf = [0u8; HEADER_LEN];
        let n = read_full(reader, &mut buf)?;
        Self::parse(&buf[..n])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncryptedBlock {
    pub tag: HaltTag,
    pub body: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncryptedMessage {
    pub header: FrameHeader,
    pub blocks: Vec<EncryptedBlock>,
}

impl EncryptedMessage {
    pub fn payload_len(&self) -> usize {
        self.blocks.iter().map(|b| b.body.len()).sum()
    }

    pub fn encoded_len(&self) -> usize {
        HEADER_LEN + self.blocks.len() * TAG_LEN + self.payload_len()
    }

    /// Bits this frame adds over the bare ciphertext, not counting the
    /// envelope: the packed parameter, 28 bootstrap tags and one tag per block.
    pub fn overhead_bits(&self) -> u64 {
        8 * (self.encoded_len() - self.payload_len() - ENVELOPE_LEN) as u64
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        out.extend_from_slice(&self.header.to_bytes());
        for block in &self.blocks {
            out.extend_from_slice(&block.tag.0.to_le_bytes());
            out.extend_from_slice(&block.body);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let header = FrameHeader::parse(bytes)?;
        let blocks = split_blocks(&bytes[HEADER_LEN..])?
            .map(|(tag, body)| EncryptedBlock {
                tag,
                body: body.to_vec(),
            })
            .collect();
        Ok(Self { header, blocks })
    }
}

/// Splits the block section of a frame into `(tag, body)` pairs.
pub fn split_blocks(mut rest: &[u8]) -> Result<impl Iterator<Item = (HaltTag, &[u8])>> {
    let tail = rest.len() % FRAMED_BLOCK_LEN;
    if tail != 0 && tail <= TAG_LEN {
        return Err(Error::MalformedFrame(format!(
            "truncated final block ({tail} trailing bytes)"
        )));
    }
    Ok(std::iter::from_fn(move || {
        if rest.is_empty() {
            return None;
        }
        let take = rest.len().min(FRAMED_BLOCK_LEN);
        let (block, next) = rest.split_at(take);
        rest = next;
        Some((
            HaltTag(u16::from_le_bytes([block[0], block[1]])),
            &block[TAG_LEN..],
        ))
    }))
}

/// Reads until `buf` is full or the reader is exhausted.
pub(crate) fn read_full<R: Read>(reader: &mut R, buf: &mut [u8]) -> std::io::Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match reader.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(n) => filled += n,
            Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e),
        }
    }
    Ok(filled)
}
