//! Cipher state construction, the ARX quarter round, round application and
//! keystream serialization.
//!
//! The state is the IETF ChaCha 4x4 matrix with three modifications: the
//! first three constants are masked with the sender's random words, the
//! first two key words are masked with the packed cipher parameter, and the
//! block counter is masked with the fourth random word.

use std::fmt;

use crate::error::{Error, Result};

/// "expand 32-byte k"
pub const CONSTANTS: [u32; 4] = [0x6170_7865, 0x3320_646e, 0x7962_2d32, 0x6b20_6574];

pub const BLOCK_LEN: usize = 64;
pub const KEY_LEN: usize = 32;
pub const NONCE_LEN: usize = 12;

/// The five tunables of the cipher.
///
/// Always valid once constructed: `1 <= r_min <= r_max`, `h_i` divides both
/// round bounds, `h_c` is 1, 2 or 3 and `i_c` lies in `[8, 32]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CipherParameter {
    r_min: u16,
    r_max: u16,
    h_i: u16,
    h_c: u8,
    i_c: u8,
}

impl CipherParameter {
    pub const MIN_PEPPER_BITS: u8 = 8;
    pub const MAX_PEPPER_BITS: u8 = 32;

    pub fn new(r_min: u16, r_max: u16, h_i: u16, h_c: u8, i_c: u8) -> Result<Self> {
        RoundSchedule::new(u32::from(r_min), u32::from(r_max), u32::from(h_i), h_c)?;
        if !(Self::MIN_PEPPER_BITS..=Self::MAX_PEPPER_BITS).contains(&i_c) {
            return Err(Error::InvalidParameter(format!(
                "i_c = {i_c} outside [{}, {}]",
                Self::MIN_PEPPER_BITS,
                Self::MAX_PEPPER_BITS
            )));
        }
        Ok(Self {
            r_min,
            r_max,
            h_i,
            h_c,
            i_c,
        })
    }

    pub fn r_min(&self) -> u16 {
        self.r_min
    }

    pub fn r_max(&self) -> u16 {
        self.r_max
    }

    pub fn h_i(&self) -> u16 {
        self.h_i
    }

    pub fn h_c(&self) -> u8 {
        self.h_c
    }

    pub fn i_c(&self) -> u8 {
        self.i_c
    }

    /// Packs the fields as `R_min(16) | R_max(16) | H_I(16) | H_C(8) | I_C(8)`,
    /// most significant field first.
    pub fn pack(&self) -> u64 {
        (u64::from(self.r_min) << 48)
            | (u64::from(self.r_max) << 32)
            | (u64::from(self.h_i) << 16)
            | (u64::from(self.h_c) << 8)
            | u64::from(self.i_c)
    }

    pub fn unpack(packed: u64) -> Result<Self> {
        Self::new(
            (packed >> 48) as u16,
            (packed >> 32) as u16,
            (packed >> 16) as u16,
            (packed >> 8) as u8,
            packed as u8,
        )
    }

    /// The per-block round schedule this parameter selects.
    pub fn schedule(&self) -> RoundSchedule {
        RoundSchedule {
            r_min: u32::from(self.r_min),
            r_max: u32::from(self.r_max),
            h_i: u32::from(self.h_i),
            h_c: self.h_c,
        }
    }

    /// `N_r`, the number of distinct round counts a block may use.
    pub fn round_choices(&self) -> u32 {
        self.schedule().round_choices()
    }
}

/// Splits a packed parameter into the two words XORed into key words 0 and 1.
/// Word 0 carries `R_min | R_max`, word 1 carries `H_I | H_C | I_C`.
pub fn parameter_words(packed: u64) -> [u32; 2] {
    [(packed >> 32) as u32, packed as u32]
}

/// The round bounds, hash interval and hash complexity used by a single
/// block operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RoundSchedule {
    r_min: u32,
    r_max: u32,
    h_i: u32,
    h_c: u8,
}

impl RoundSchedule {
    /// The temporary configuration used while bootstrapping the random words.
    pub const BOOTSTRAP: RoundSchedule = RoundSchedule {
        r_min: 12,
        r_max: 36,
        h_i: 1,
        h_c: 3,
    };

    pub fn new(r_min: u32, r_max: u32, h_i: u32, h_c: u8) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if r_min == 0 || r_min > r_max || r_max > u32::from(u16::MAX) {
            return bad(format!(
                "round bounds [{r_min}, {r_max}] must satisfy 1 <= r_min <= r_max <= 65535"
            ));
        }
        if h_i == 0 || h_i > r_min || !r_min.is_multiple_of(h_i) || !r_max.is_multiple_of(h_i) {
            return bad(format!(
                "h_i = {h_i} must divide both r_min = {r_min} and r_max = {r_max}"
            ));
        }
        if !(1..=3).contains(&h_c) {
            return bad(format!("h_c = {h_c} outside {{1, 2, 3}}"));
        }
        Ok(Self {
            r_min,
            r_max,
            h_i,
            h_c,
        })
    }

    pub fn r_min(&self) -> u32 {
        self.r_min
    }

    pub fn r_max(&self) -> u32 {
        self.r_max
    }

    pub fn h_i(&self) -> u32 {
        self.h_i
    }

    pub fn h_c(&self) -> u8 {
        self.h_c
    }

    pub fn round_choices(&self) -> u32 {
        (self.r_max - self.r_min) / self.h_i + 1
    }

    /// Rounds at which the halting hash is evaluated.
    #[inline]
    pub fn is_checkpoint(&self, r: u32) -> bool {
        r >= self.r_min && r.is_multiple_of(self.h_i)
    }

    /// The `k`-th admissible round count, `r_min + k * h_i`.
    pub fn round_at(&self, k: u32) -> u32 {
        self.r_min + k * self.h_i
    }

    /// Checkpoints evaluated while running to round `r` with no collisions.
    pub fn checkpoints_until(&self, r: u32) -> u32 {
        if r < self.r_min {
            0
        } else {
            (r - self.r_min) / self.h_i + 1
        }
    }
}

/// A 256-bit key held as eight little-endian words. 128-bit keys are
/// doubled, as ChaCha does.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct Key([u32; 8]);

impl Key {
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let expanded: [u8; KEY_LEN] = match bytes.len() {
            32 => bytes.try_into().expect("length checked"),
            16 => {
                let mut k = [0u8; KEY_LEN];
                k[..16].copy_from_slice(bytes);
                k[16..].copy_from_slice(bytes);
                k
            }
            n => return Err(Error::InvalidKeyLength(n)),
        };
        let mut words = [0u32; 8];
        for (w, chunk) in words.iter_mut().zip(expanded.chunks_exact(4)) {
            *w = u32::from_le_bytes(chunk.try_into().expect("4-byte chunk"));
        }
        Ok(Self(words))
    }

    pub fn words(&self) -> &[u32; 8] {
        &self.0
    }
}

impl fmt::Debug for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Key(..)")
    }
}

/// A 96-bit public nonce.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Nonce(pub [u8; NONCE_LEN]);

impl Nonce {
    pub fn words(&self) -> [u32; 3] {
        let mut w = [0u32; 3];
        for (w, chunk) in w.iter_mut().zip(self.0.chunks_exact(4)) {
            *w = u32::from_le_bytes(chunk.try_into().expect("4-byte chunk"));
        }
        w
    }
}

/// Key, nonce and block counter: the ChaCha inputs to the initial state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KeyMaterial {
    pub key: Key,
    pub nonce: Nonce,
    pub counter: u32,
}

impl KeyMaterial {
    pub fn new(key: Key, nonce: Nonce) -> Self {
        Self {
            key,
            nonce,
            counter: 0,
        }
    }

    pub fn with_counter(mut self, counter: u32) -> Self {
        self.counter = counter;
        self
    }
}

/// The 128-bit sender secret. All zero until the bootstrap completes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct RandomWords(pub [u32; 4]);

impl RandomWords {
    pub const ZERO: RandomWords = RandomWords([0; 4]);
}

/// Sixteen 32-bit words, row-major.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct CipherState(pub [u32; 16]);

#[inline(always)]
fn qr(s: &mut [u32; 16], a: usize, b: usize, c: usize, d: usize) {
    let (na, nb, nc, nd) = quarter_round(s[a], s[b], s[c], s[d]);
    s[a] = na;
    s[b] = nb;
    s[c] = nc;
    s[d] = nd;
}

/// The ChaCha quarter round: add, xor, rotate by 16, 12, 8 and 7.
#[inline(always)]
pub fn quarter_round(mut a: u32, mut b: u32, mut c: u32, mut d: u32) -> (u32, u32, u32, u32) {
    a = a.wrapping_add(b);
    d = (d ^ a).rotate_left(16);
    c = c.wrapping_add(d);
    b = (b ^ c).rotate_left(12);
    a = a.wrapping_add(b);
    d = (d ^ a).rotate_left(8);
    c = c.wrapping_add(d);
    b = (b ^ c).rotate_left(7);
    (a, b, c, d)
}

impl CipherState {
    /// Builds the initial state from a raw packed parameter. A packed value
    /// of zero together with zero random words yields the IETF ChaCha20 state.
    pub fn initial(km: &KeyMaterial, packed: u64, rw: &RandomWords) -> Self {
        let k = km.key.words();
        let n = km.nonce.words();
        let p = parameter_words(packed);
        let rw = rw.0;
        CipherState([
            CONSTANTS[0] ^ rw[0],
            CONSTANTS[1] ^ rw[1],
            CONSTANTS[2] ^ rw[2],
            CONSTANTS[3],
            k[0] ^ p[0],
            k[1] ^ p[1],
            k[2],
            k[3],
            k[4],
            k[5],
            k[6],
            k[7],
            km.counter ^ rw[3],
            n[0],
            n[1],
            n[2],
        ])
    }

    pub fn words(&self) -> &[u32; 16] {
        &self.0
    }

    /// Applies round `r`: column quarter rounds when `r` is odd, diagonal
    /// quarter rounds when it is even.
    #[inline]
    pub fn round(&mut self, r: u32) {
        let s = &mut self.0;
        if r % 2 == 1 {
            qr(s, 0, 4, 8, 12);
            qr(s, 1, 5, 9, 13);
            qr(s, 2, 6, 10, 14);
            qr(s, 3, 7, 11, 15);
        } else {
            qr(s, 0, 5, 10, 15);
            qr(s, 1, 6, 11, 12);
            qr(s, 2, 7, 8, 13);
            qr(s, 3, 4, 9, 14);
        }
    }
}

pub fn build_initial_state(
    km: &KeyMaterial,
    cp: &CipherParameter,
    rw: &RandomWords,
) -> CipherState {
    CipherState::initial(km, cp.pack(), rw)
}

pub fn apply_round(mut state: CipherState, r: u32) -> CipherState {
    state.round(r);
    state
}

/// `little_endian(final + initial)`, word-wise modulo 2^32.
pub fn keystream(initial: &CipherState, last: &CipherState) -> [u8; BLOCK_LEN] {
    let mut out = [0u8; BLOCK_LEN];
    for ((chunk, a), b) in out
        .chunks_exact_mut(4)
        .zip(initial.0.iter())
        .zip(last.0.iter())
    {
        chunk.copy_from_slice(&b.wrapping_add(*a).to_le_bytes());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn inv_quarter_round(mut a: u32, mut b: u32, mut c: u32, mut d: u32) -> (u32, u32, u32, u32) {
        b = b.rotate_right(7) ^ c;
        c = c.wrapping_sub(d);
        d = d.rotate_right(8) ^ a;
        a = a.wrapping_sub(b);
        b = b.rotate_right(12) ^ c;
        c = c.wrapping_sub(d);
        d = d.rotate_right(16) ^ a;
        a = a.wrapping_sub(b);
        (a, b, c, d)
    }

    fn inv_qr(s: &mut [u32; 16], a: usize, b: usize, c: usize, d: usize) {
        let (na, nb, nc, nd) = inv_quarter_round(s[a], s[b], s[c], s[d]);
        s[a] = na;
        s[b] = nb;
        s[c] = nc;
        s[d] = nd;
    }

    fn inv_round(s: &mut CipherState, r: u32) {
        let s = &mut s.0;
        if r % 2 == 1 {
            inv_qr(s, 0, 4, 8, 12);
            inv_qr(s, 1, 5, 9, 13);
            inv_qr(s, 2, 6, 10, 14);
            inv_qr(s, 3, 7, 11, 15);
        } else {
            inv_qr(s, 0, 5, 10, 15);
            inv_qr(s, 1, 6, 11, 12);
            inv_qr(s, 2, 7, 8, 13);
            inv_qr(s, 3, 4, 9, 14);
        }
    }

    #[test]
    fn quarter_round_vectors() {
        assert_eq!(quarter_round(0, 0, 0, 0), (0, 0, 0, 0));
        // Evaluated step by step with an independent scalar script.
        assert_eq!(
            quarter_round(0x1111_1111, 0x0102_0304, 0x9b8d_6f43, 0x0123_4567),
            (0xea2a_92f4, 0xcb1c_f8ce, 0x4581_472e, 0x5881_c4bb)
        );
    }

    #[test]
    fn zero_state_is_fixed() {
        assert_eq!(
            apply_round(CipherState::default(), 1),
            CipherState::default()
        );
        assert_eq!(
            apply_round(CipherState::default(), 2),
            CipherState::default()
        );
    }

    #[test]
    fn double_round_matches_column_then_diagonal() {
        let mut s = CipherState(core::array::from_fn(|i| {
            (i as u32).wrapping_mul(0x9e37_79b9)
        }));
        let mut expected = s.0;
        for (a, b, c, d) in [(0, 4, 8, 12), (1, 5, 9, 13), (2, 6, 10, 14), (3, 7, 11, 15)] {
            qr(&mut expected, a, b, c, d);
        }
        for (a, b, c, d) in [(0, 5, 10, 15), (1, 6, 11, 12), (2, 7, 8, 13), (3, 4, 9, 14)] {
            qr(&mut expected, a, b, c, d);
        }
        s.round(1);
        s.round(2);
        assert_eq!(s.0, expected);
    }

    #[test]
    fn le_serialization() {
        let mut last = CipherState::default();
        last.0[0] = 0x0102_0304;
        let ks = keystream(&CipherState::default(), &last);
        assert_eq!(&ks[..4], &[4, 3, 2, 1]);
        assert!(ks[4..].iter().all(|&b| b == 0));
        assert_eq!(
            keystream(&CipherState::default(), &CipherState::default()),
            [0u8; 64]
        );
    }

    #[test]
    fn parameter_validation() {
        assert!(CipherParameter::new(8, 32, 2, 2, 20).is_ok());
        assert!(CipherParameter::new(0, 32, 1, 2, 20).is_err());
        assert!(CipherParameter::new(33, 32, 1, 2, 20).is_err());
        assert!(CipherParameter::new(8, 32, 3, 2, 20).is_err());
        assert!(CipherParameter::new(8, 32, 16, 2, 20).is_err());
        assert!(CipherParameter::new(8, 32, 2, 0, 20).is_err());
        assert!(CipherParameter::new(8, 32, 2, 4, 20).is_err());
        assert!(CipherParameter::new(8, 32, 2, 2, 7).is_err());
        assert!(CipherParameter::new(8, 32, 2, 2, 33).is_err());
        assert!(CipherParameter::new(1, 1, 1, 1, 8).is_ok());
        assert!(CipherParameter::new(65535, 65535, 1, 3, 32).is_ok());
    }

    #[test]
    fn packing_layout() {
        let cp = CipherParameter::new(0x0102, 0x0306, 0x0102, 3, 20).unwrap();
        assert_eq!(cp.pack(), 0x0102_0306_0102_0314);
        assert_eq!(parameter_words(cp.pack()), [0x0102_0306, 0x0102_0314]);
        assert_eq!(CipherParameter::unpack(cp.pack()).unwrap(), cp);
    }

    #[test]
    fn short_keys_are_doubled() {
        let short: Vec<u8> = (0u8..16).collect();
        let mut long = short.clone();
        long.extend_from_slice(&short);
        assert_eq!(
            Key::from_bytes(&short).unwrap(),
            Key::from_bytes(&long).unwrap()
        );
        assert!(matches!(
            Key::from_bytes(&[0u8; 24]),
            Err(Error::InvalidKeyLength(24))
        ));
    }

    fn km_from(seed: u32) -> KeyMaterial {
        let key: Vec<u8> = (0..32)
            .map(|i| (seed.wrapping_mul(31).wrapping_add(i)) as u8)
            .collect();
        KeyMaterial::new(Key::from_bytes(&key).unwrap(), Nonce([seed as u8; 12])).with_counter(seed)
    }

    #[test]
    fn initial_state_layout() {
        let km = km_from(7);
        let chacha = CipherState::initial(&km, 0, &RandomWords::ZERO);
        assert_eq!(&chacha.0[..4], &CONSTANTS);
        assert_eq!(&chacha.0[4..12], km.key.words());
        assert_eq!(chacha.0[12], 7);
        assert_eq!(&chacha.0[13..], &km.nonce.words());

        let cp = CipherParameter::new(8, 32, 2, 2, 20).unwrap();
        let s = build_initial_state(&km, &cp, &RandomWords::ZERO);
        let halves = parameter_words(cp.pack());
        let mut expected = chacha;
        expected.0[4] ^= halves[0];
        expected.0[5] ^= halves[1];
        assert_eq!(s, expected);

        let rw = RandomWords([1, 2, 3, 0xFFFF_FFFF]);
        let s = build_initial_state(&km.with_counter(5), &cp, &rw);
        assert_eq!(s.0[12], 0xFFFF_FFFA);
        assert_eq!(s.0[0], CONSTANTS[0] ^ 1);
        assert_eq!(s.0[2], CONSTANTS[2] ^ 3);
        assert_eq!(s.0[3], CONSTANTS[3]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn quarter_round_is_invertible(a: u32, b: u32, c: u32, d: u32) {
            let (w, x, y, z) = quarter_round(a, b, c, d);
            prop_assert_eq!(inv_quarter_round(w, x, y, z), (a, b, c, d));
        }

        #[test]
        fn rounds_are_permutations(words: [u32; 16], r in 1u32..1000) {
            let start = CipherState(words);
            let mut s = apply_round(start, r);
            inv_round(&mut s, r);
            prop_assert_eq!(s, start);
        }
    }
}
