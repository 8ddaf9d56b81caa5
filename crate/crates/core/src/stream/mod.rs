//! Message-level encryption: one bootstrap per message, then one randomly
//! sized round count and one 16-bit tag per 64-byte block.
//!
//! The ciphertext is not authenticated. Pair it with a MAC.

pub mod block;
pub mod frame;

use std::io::{Read, Write};

use crate::entropy::{PepperDistribution, RandomSource};
use crate::error::{Error, Result};
use crate::hash::{CollisionTable, HaltTag};
use crate::init::{init_receiver_metered, init_sender, InitHashes, ReceiverInit, SenderInit, Work};
use crate::state::{
    build_initial_state, CipherParameter, CipherState, Key, KeyMaterial, RandomWords,
    RoundSchedule, BLOCK_LEN,
};

use self::block::{decrypt_block, encrypt_block};
use self::frame::{
    read_full, split_blocks, EncryptedBlock, EncryptedMessage, FrameHeader, FRAMED_BLOCK_LEN,
    TAG_LEN,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Sender,
    Receiver,
}

/// Post-bootstrap block context. Counter starts at 0 and advances by one
/// per block; a session covers at most 2^32 blocks.
pub struct Session {
    s0: CipherState,
    rw: RandomWords,
    schedule: RoundSchedule,
    next: u64,
    role: Role,
    table: CollisionTable,
}

impl Session {
    /// Runs the sender bootstrap and returns the session with the tags to send.
    pub fn sender(
        km: &KeyMaterial,
        cp: &CipherParameter,
        rng: &mut RandomSource,
        dist: PepperDistribution,
    ) -> Result<(Self, SenderInit)> {
        let init = init_sender(km, cp, rng, dist)?;
        Ok((
            Self::from_parts(km, cp, init.random_words, Role::Sender),
            init,
        ))
    }

    pub fn receiver(
        km: &KeyMaterial,
        cp: &CipherParameter,
        hashes: &InitHashes,
    ) -> Result<(Self, ReceiverInit)> {
        Self::receiver_metered(km, cp, hashes, &mut Work::default())
    }

    pub fn receiver_metered(
        km: &KeyMaterial,
        cp: &CipherParameter,
        hashes: &InitHashes,
        work: &mut Work,
    ) -> Result<(Self, ReceiverInit)> {
        let init = init_receiver_metered(km, cp, hashes, work)?;
        Ok((
            Self::from_parts(km, cp, init.random_words, Role::Receiver),
            init,
        ))
    }

    /// A session with known random words, skipping the bootstrap.
    ///
    /// Reusing random words is only sound for a fixed nonce; otherwise
    /// prefer [`Session::sender`].
    pub fn from_parts(km: &KeyMaterial, cp: &CipherParameter, rw: RandomWords, role: Role) -> Self {
        Self {
            s0: build_initial_state(&km.with_counter(0), cp, &rw),
            rw,
            schedule: cp.schedule(),
            next: 0,
            role,
            table: CollisionTable::new(),
        }
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn random_words(&self) -> RandomWords {
        self.rw
    }

    pub fn initial_state(&self) -> &CipherState {
        &self.s0
    }

    /// Counter of the next block.
    pub fn counter(&self) -> u64 {
        self.next
    }

    /// Jumps to block `counter`. Blocks are independent once the random
    /// words are known, so this allows random access.
    pub fn seek(&mut self, counter: u32) {
        self.next = u64::from(counter);
    }

    fn take_counter(&mut self) -> Result<u32> {
        let c = u32::try_from(self.next).map_err(|_| Error::CounterOverflow)?;
        self.next += 1;
        Ok(c)
    }

    /// Encrypts up to 64 bytes in place and returns the block's tag.
    pub fn encrypt_block(&mut self, data: &mut [u8], rng: &mut RandomSource) -> Result<HaltTag> {
        assert!(data.len() <= BLOCK_LEN);
        let counter = self.take_counter()?;
        let out = encrypt_block(
            &self.s0,
            Some(data),
            &self.rw,
            &self.schedule,
            counter,
            rng,
            &mut self.table,
        )?;
        Ok(out.tag)
    }

    /// Decrypts up to 64 bytes in place, returning the rounds used.
    pub fn decrypt_block(&mut self, data: &mut [u8], tag: HaltTag) -> Result<u32> {
        assert!(data.len() <= BLOCK_LEN);
        let counter = self.take_counter()?;
        let out = decrypt_block(
            &self.s0,
            Some(data),
            tag,
            &self.rw,
            &self.schedule,
            counter,
            &mut self.table,
        );
        if out.halted() {
            Ok(out.rounds)
        } else {
            Err(Error::BlockHalt {
                index: u64::from(counter),
            })
        }
    }
}

pub fn encrypt_message(
    km: &KeyMaterial,
    cp: &CipherParameter,
    plaintext: &[u8],
    rng: &mut RandomSource,
) -> Result<EncryptedMessage> {
    encrypt_message_with(km, cp, plaintext, rng, PepperDistribution::Uniform)
}

pub fn encrypt_message_with(
    km: &KeyMaterial,
    cp: &CipherParameter,
    plaintext: &[u8],
    rng: &mut RandomSource,
    dist: PepperDistribution,
) -> Result<EncryptedMessage> {
    if plaintext.len().div_ceil(BLOCK_LEN) as u64 > 1 << 32 {
        return Err(Error::CounterOverflow);
    }
    let (mut session, init) = Session::sender(km, cp, rng, dist)?;
    let header = FrameHeader {
        parameter: *cp,
        nonce: km.nonce,
        boot: init.hashes,
    };
    let blocks = plaintext
        .chunks(BLOCK_LEN)
        .map(|chunk| {
            let mut body = chunk.to_vec();
            let tag = session.encrypt_block(&mut body, rng)?;
            Ok(EncryptedBlock { tag, body })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EncryptedMessage { header, blocks })
}

pub fn decrypt_message(key: &Key, msg: &EncryptedMessage) -> Result<Vec<u8>> {
    decrypt_message_metered(key, msg, &mut Work::default())
}

/// [`decrypt_message`] that also tallies the cipher work, bootstrap included.
pub fn decrypt_message_metered(
    key: &Key,
    msg: &EncryptedMessage,
    work: &mut Work,
) -> Result<Vec<u8>> {
    let km = KeyMaterial::new(*key, msg.header.nonce);
    let (mut session, _) =
        Session::receiver_metered(&km, &msg.header.parameter, &msg.header.boot, work)?;
    let mut out = Vec::with_capacity(msg.payload_len());
    for (i, block) in msg.blocks.iter().enumerate() {
        if block.body.is_empty()
            || block.body.len() > BLOCK_LEN
            || (i + 1 < msg.blocks.len() && block.body.len() != BLOCK_LEN)
        {
            return Err(Error::MalformedFrame(format!(
                "block {i} has {} bytes",
                block.body.len()
            )));
        }
        let start = out.len();
        out.extend_from_slice(&block.body);
        let rounds = session.decrypt_block(&mut out[start..], block.tag)?;
        work.rounds += u64::from(rounds);
        work.blocks += 1;
    }
    Ok(out)
}

/// Decrypts a serialized frame.
pub fn decrypt_frame(key: &Key, bytes: &[u8]) -> Result<Vec<u8>> {
    let header = FrameHeader::parse(bytes)?;
    let km = KeyMaterial::new(*key, header.nonce);
    let blocks = split_blocks(&bytes[frame::HEADER_LEN..])?;
    let (mut session, _) = Session::receiver(&km, &header.parameter, &header.boot)?;
    let mut out = Vec::new();
    for (tag, body) in blocks {
        let start = out.len();
        out.extend_from_slice(body);
        session.decrypt_block(&mut out[start..], tag)?;
    }
    Ok(out)
}

/// Encrypts everything `reader` yields into a frame on `writer`, one block
/// at a time. Returns the number of plaintext bytes.
pub fn encrypt_stream<R: Read, W: Write>(
    km: &KeyMaterial,
    cp: &CipherParameter,
    rng: &mut RandomSource,
    dist: PepperDistribution,
    mut reader: R,
    mut writer: W,
) -> Result<u64> {
    let (mut session, init) = Session::sender(km, cp, rng, dist)?;
    let header = FrameHeader {
        parameter: *cp,
        nonce: km.nonce,
        boot: init.hashes,
    };
    writer.write_all(&header.to_bytes())?;
    let mut total = 0u64;
    let mut buf = [0u8; BLOCK_LEN];
    loop {
        let n = read_full(&mut reader, &mut buf)?;
        if n == 0 {
            break;
        }
        let tag = session.encrypt_block(&mut buf[..n], rng)?;
        writer.write_all(&tag.0.to_le_bytes())?;
        writer.write_all(&buf[..n])?;
        total += n as u64;
        if n < BLOCK_LEN {
            break;
        }
    }
    writer.flush()?;
    Ok(total)
}

/// Streaming counterpart of [`decrypt_frame`]. Plaintext is written block by
/// block, so on error `writer` may already hold a prefix; callers that must
/// not expose partial output should write to a staging location.
pub fn decrypt_stream<R: Read, W: Write>(key: &Key, mut reader: R, mut writer: W) -> Result<u64> {
    let header = FrameHeader::read_from(&mut reader)?;
    let km = KeyMaterial::new(*key, header.nonce);
    let (mut session, _) = Session::receiver(&km, &header.parameter, &header.boot)?;
    let mut total = 0u64;
    let mut buf = [0u8; FRAMED_BLOCK_LEN];
    loop {
        let n = read_full(&mut reader, &mut buf)?;
        match n {
            0 => break,
            1..=TAG_LEN => {
                return Err(Error::MalformedFrame(format!(
                    "truncated final block ({n} trailing bytes)"
                )))
            }
            _ => {}
        }
        let tag = HaltTag(u16::from_le_bytes([buf[0], buf[1]]));
        let body = &mut buf[TAG_LEN..n];
        session.decrypt_block(body, tag)?;
        writer.write_all(body)?;
        total += body.len() as u64;
        if n < FRAMED_BLOCK_LEN {
            break;
        }
    }
    writer.flush()?;
    Ok(total)
}
