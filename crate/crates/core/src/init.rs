//! Sender and receiver initialization.
//!
//! The sender picks a secret pepper, advances constant word 3 by it, and
//! encrypts 28 empty blocks under the bootstrap schedule (12..=36 rounds,
//! hash every round, full-state hash). Only the 28 final tags are sent. The
//! receiver walks constant word 3 upward from zero until every one of the 28
//! tags halts, and reads the round counts off that offset. The 28 round
//! counts, as base-25 digits, become the 128 random words.
//!
//! A wrong key never halts (except with probability about 10^-96), so it
//! pays for the full `2^i_c` offset scan.

use crate::entropy::{PepperDistribution, RandomSource};
use crate::error::{Error, Result};
use crate::hash::{CollisionTable, HaltTag};
use crate::state::{CipherParameter, CipherState, KeyMaterial, RandomWords, RoundSchedule};
use crate::stream::block::{decrypt_block, encrypt_block_with_rounds};

pub const BOOTSTRAP_BLOCKS: usize = 28;
pub const INIT_HASHES_LEN: usize = 2 * BOOTSTRAP_BLOCKS;

const MIN_INIT_ROUNDS: u32 = 12;
const MAX_INIT_ROUNDS: u32 = 36;

/// The pepper: how far constant word 3 was advanced. Never transmitted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pepper(pub u32);

/// The 28 cleartext bootstrap tags, in counter order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct InitHashes(pub [HaltTag; BOOTSTRAP_BLOCKS]);

impl InitHashes {
    pub fn to_bytes(&self) -> [u8; INIT_HASHES_LEN] {
        let mut out = [0u8; INIT_HASHES_LEN];
        for (chunk, tag) in out.chunks_exact_mut(2).zip(self.0.iter()) {
            chunk.copy_from_slice(&tag.0.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8; INIT_HASHES_LEN]) -> Self {
        let mut tags = [HaltTag(0); BOOTSTRAP_BLOCKS];
        for (tag, chunk) in tags.iter_mut().zip(bytes.chunks_exact(2)) {
            *tag = HaltTag(u16::from_le_bytes([chunk[0], chunk[1]]));
        }
        Self(tags)
    }
}

/// Round counts of the 28 bootstrap blocks, each in `[12, 36]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RoundVector([u8; BOOTSTRAP_BLOCKS]);

impl RoundVector {
    pub fn new(rounds: [u32; BOOTSTRAP_BLOCKS]) -> Result<Self> {
        let mut out = [0u8; BOOTSTRAP_BLOCKS];
        for (o, &r) in out.iter_mut().zip(rounds.iter()) {
            if !(MIN_INIT_ROUNDS..=MAX_INIT_ROUNDS).contains(&r) {
                return Err(Error::Domain(format!(
                    "bootstrap round count {r} outside [12, 36]"
                )));
            }
            *o = r as u8;
        }
        Ok(Self(out))
    }

    pub fn rounds(&self) -> [u32; BOOTSTRAP_BLOCKS] {
        self.0.map(u32::from)
    }
}

/// Reads the round vector as a base-25 number, least significant digit
/// first, reduced modulo 2^128. Word 0 holds the low 32 bits.
pub fn derive_random_words(rv: &RoundVector) -> RandomWords {
    let value = rv.0.iter().rev().fold(0u128, |acc, &r| {
        acc.wrapping_mul(25)
            .wrapping_add(u128::from(u32::from(r) - MIN_INIT_ROUNDS))
    });
    RandomWords(core::array::from_fn(|j| (value >> (32 * j)) as u32))
}

/// Cipher work spent by an initialization or decryption, for cost
/// accounting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Work {
    pub rounds: u64,
    pub checkpoints: u64,
    pub blocks: u64,
    /// Pepper offsets examined by a receiver scan.
    pub offsets: u64,
}

impl std::ops::AddAssign for Work {
    fn add_assign(&mut self, rhs: Self) {
        self.rounds += rhs.rounds;
        self.checkpoints += rhs.checkpoints;
        self.blocks += rhs.blocks;
        self.offsets += rhs.offsets;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SenderInit {
    pub hashes: InitHashes,
    pub random_words: RandomWords,
    /// Offset the receiver will halt at. Equals the drawn pepper unless the
    /// pre-scan found an earlier offset that reproduces all 28 tags.
    pub pepper: Pepper,
    pub drawn_pepper: Pepper,
    pub rounds: RoundVector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReceiverInit {
    pub random_words: RandomWords,
    pub pepper: Pepper,
    pub rounds: RoundVector,
}

/// Bootstrap state: the user's packed parameter, zero random words.
fn bootstrap_state(km: &KeyMaterial, cp: &CipherParameter) -> CipherState {
    CipherState::initial(km, cp.pack(), &RandomWords::ZERO)
}

fn at_offset(base: &CipherState, offset: u32) -> CipherState {
    let mut s = *base;
    s.0[3] = s.0[3].wrapping_add(offset);
    s
}

/// Receiver-side search over pepper offsets for one key and parameter.
pub struct BootstrapScanner {
    base: CipherState,
    table: CollisionTable,
}

impl BootstrapScanner {
    pub fn new(km: &KeyMaterial, cp: &CipherParameter) -> Self {
        Self {
            base: bootstrap_state(km, cp),
            table: CollisionTable::new(),
        }
    }

    /// Switches to another key or parameter, keeping the scratch table.
    pub fn rekey(&mut self, km: &KeyMaterial, cp: &CipherParameter) {
        self.base = bootstrap_state(km, cp);
    }

    /// Runs the 28 bootstrap decryptions at one offset, stopping at the
    /// first block that fails to halt.
    pub fn attempt(
        &mut self,
        offset: u32,
        hashes: &InitHashes,
        work: &mut Work,
    ) -> Option<RoundVector> {
        let s0 = at_offset(&self.base, offset);
        let mut rounds = [0u32; BOOTSTRAP_BLOCKS];
        work.offsets += 1;
        for (i, (slot, &expected)) in rounds.iter_mut().zip(hashes.0.iter()).enumerate() {
            let out = decrypt_block(
                &s0,
                None,
                expected,
                &RandomWords::ZERO,
                &RoundSchedule::BOOTSTRAP,
                i as u32,
                &mut self.table,
            );
            work.rounds += u64::from(out.rounds_executed);
            work.checkpoints += u64::from(out.checkpoints);
            work.blocks += 1;
            if !out.halted() {
                return None;
            }
            *slot = out.rounds;
        }
        Some(RoundVector::new(rounds).expect("halting rounds lie in [12, 36]"))
    }

    /// Lowest offset in `offsets` at which all 28 tags halt.
    pub fn scan(
        &mut self,
        offsets: std::ops::Range<u64>,
        hashes: &InitHashes,
        work: &mut Work,
    ) -> Option<(Pepper, RoundVector)> {
        offsets.into_iter().find_map(|p| {
            let offset = p as u32;
            self.attempt(offset, hashes, work)
                .map(|r| (Pepper(offset), r))
        })
    }
}

pub fn init_sender(
    km: &KeyMaterial,
    cp: &CipherParameter,
    rng: &mut RandomSource,
    dist: PepperDistribution,
) -> Result<SenderInit> {
    let pepper = rng.pepper(cp.i_c(), dist)?;
    let base = bootstrap_state(km, cp);
    let s0 = at_offset(&base, pepper.0);
    let mut table = CollisionTable::new();
    let mut tags = [HaltTag(0); BOOTSTRAP_BLOCKS];
    let mut drawn = [0u32; BOOTSTRAP_BLOCKS];
    for (i, (tag, r)) in tags.iter_mut().zip(drawn.iter_mut()).enumerate() {
        let rounds = rng.uniform(MIN_INIT_ROUNDS, MAX_INIT_ROUNDS)?;
        let out = encrypt_block_with_rounds(
            &s0,
            None,
            &RandomWords::ZERO,
            &RoundSchedule::BOOTSTRAP,
            i as u32,
            rounds,
            &mut table,
            &mut (),
        );
        *tag = out.tag;
        *r = out.rounds;
    }
    let hashes = InitHashes(tags);
    let drawn = RoundVector::new(drawn)?;
    let (adopted, rounds) = reconcile_sender(km, cp, pepper, &hashes, drawn);
    Ok(SenderInit {
        hashes,
        random_words: derive_random_words(&rounds),
        pepper: adopted,
        drawn_pepper: pepper,
        rounds,
    })
}

/// The sender's pre-scan. Replays the receiver's search over offsets
/// `[0, pepper)`; if some earlier offset reproduces all 28 tags the receiver
/// will stop there, so the sender adopts that offset and its round counts.
pub fn reconcile_sender(
    km: &KeyMaterial,
    cp: &CipherParameter,
    pepper: Pepper,
    hashes: &InitHashes,
    drawn: RoundVector,
) -> (Pepper, RoundVector) {
    BootstrapScanner::new(km, cp)
        .scan(0..u64::from(pepper.0), hashes, &mut Work::default())
        .unwrap_or((pepper, drawn))
}

pub fn init_receiver(
    km: &KeyMaterial,
    cp: &CipherParameter,
    hashes: &InitHashes,
) -> Result<ReceiverInit> {
    init_receiver_metered(km, cp, hashes, &mut Work::default())
}

/// [`init_receiver`] that also tallies the rounds and checkpoints spent.
pub fn init_receiver_metered(
    km: &KeyMaterial,
    cp: &CipherParameter,
    hashes: &InitHashes,
    work: &mut Work,
) -> Result<ReceiverInit> {
    let offsets = 1u64 << cp.i_c();
    match BootstrapScanner::new(km, cp).scan(0..offsets, hashes, work) {
        Some((pepper, rounds)) => Ok(ReceiverInit {
            random_words: derive_random_words(&rounds),
            pepper,
            rounds,
        }),
        None => Err(Error::WrongKey { offsets }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{Key, Nonce};
    use num_bigint::BigUint;
    use std::collections::HashSet;

    fn km(seed: u64) -> KeyMaterial {
        let mut rng = RandomSource::seeded(seed ^ 0xfeed);
        let mut key = [0u8; 32];
        let mut nonce = [0u8; 12];
        rng.fill_bytes(&mut key).unwrap();
        rng.fill_bytes(&mut nonce).unwrap();
        KeyMaterial::new(Key::from_bytes(&key).unwrap(), Nonce(nonce))
    }

    fn reference_words(rounds: &[u32; BOOTSTRAP_BLOCKS]) -> RandomWords {
        let mut v = BigUint::from(0u32);
        for (i, &r) in rounds.iter().enumerate() {
            v += BigUint::from(r - 12) * BigUint::from(25u32).pow(i as u32);
        }
        let v = v % (BigUint::from(1u32) << 128u32);
        let mut digits = v.to_u32_digits();
        digits.resize(4, 0);
        RandomWords([digits[0], digits[1], digits[2], digits[3]])
    }

    #[test]
    fn base25_derivation() {
        assert_eq!(
            derive_random_words(&RoundVector::new([12; 28]).unwrap()),
            RandomWords::ZERO
        );
        let mut r = [12; 28];
        r[0] = 13;
        assert_eq!(
            derive_random_words(&RoundVector::new(r).unwrap()),
            RandomWords([1, 0, 0, 0])
        );
        r[0] = 12;
        r[1] = 14;
        assert_eq!(
            derive_random_words(&RoundVector::new(r).unwrap()),
            RandomWords([50, 0, 0, 0])
        );
        assert!(RoundVector::new([37; 28]).is_err());
        assert!(RoundVector::new([11; 28]).is_err());
    }

    #[test]
    fn derivation_matches_bigint_and_is_injective_in_practice() {
        let mut rng = RandomSource::seeded(5);
        let mut seen = HashSet::new();
        for i in 0..100_000 {
            let mut r = [0u32; 28];
            for x in r.iter_mut() {
                *x = rng.uniform(12, 36).unwrap();
            }
            let words = derive_random_words(&RoundVector::new(r).unwrap());
            if i < 2_000 {
                assert_eq!(words, reference_words(&r));
            }
            seen.insert((r, words));
        }
        let distinct_words: HashSet<_> = seen.iter().map(|(_, w)| *w).collect();
        let distinct_rounds: HashSet<_> = seen.iter().map(|(r, _)| *r).collect();
        assert_eq!(distinct_words.len(), distinct_rounds.len());
    }

    #[test]
    fn init_hashes_wire_layout() {
        let mut tags = [HaltTag(0); 28];
        tags[0] = HaltTag(0x0102);
        tags[27] = HaltTag(0xFFFE);
        let h = InitHashes(tags);
        let bytes = h.to_bytes();
        assert_eq!(&bytes[..2], &[0x02, 0x01]);
        assert_eq!(&bytes[54..], &[0xFE, 0xFF]);
        assert_eq!(InitHashes::from_bytes(&bytes), h);
    }

    #[test]
    fn round_trip_recovers_words_and_pepper() {
        let cp = CipherParameter::new(8, 32, 2, 2, 8).unwrap();
        let mut rng = RandomSource::seeded(99);
        for seed in 0..100 {
            let km = km(seed);
            let sent = init_sender(&km, &cp, &mut rng, PepperDistribution::Uniform).unwrap();
            let got = init_receiver(&km, &cp, &sent.hashes).unwrap();
            assert_eq!(got.random_words, sent.random_words);
            assert_eq!(got.pepper, sent.pepper);
            assert_eq!(got.rounds, sent.rounds);
        }
    }

    #[test]
    fn zero_pepper_matches_at_first_offset() {
        let cp = CipherParameter::new(8, 32, 1, 3, 10).unwrap();
        let mut rng = RandomSource::seeded(3);
        let km = km(3);
        let sent = init_sender(&km, &cp, &mut rng, PepperDistribution::Fixed(0)).unwrap();
        assert_eq!(sent.pepper, Pepper(0));
        let mut work = Work::default();
        let got = init_receiver_metered(&km, &cp, &sent.hashes, &mut work).unwrap();
        assert_eq!(got.pepper, Pepper(0));
        assert_eq!(work.offsets, 1);
        assert_eq!(work.blocks, 28);
        assert_eq!(
            work.rounds,
            sent.rounds
                .rounds()
                .iter()
                .map(|&r| u64::from(r))
                .sum::<u64>()
        );
    }

    #[test]
    fn degenerate_user_parameter_still_uses_bootstrap_schedule() {
        let cp = CipherParameter::new(1, 1, 1, 1, 8).unwrap();
        let mut rng = RandomSource::seeded(8);
        let mut distinct = HashSet::new();
        for seed in 0..20 {
            let km = km(seed);
            let sent = init_sender(&km, &cp, &mut rng, PepperDistribution::Uniform).unwrap();
            for r in sent.rounds.rounds() {
                assert!((12..=36).contains(&r));
                distinct.insert(r);
            }
            assert_eq!(
                init_receiver(&km, &cp, &sent.hashes).unwrap().random_words,
                sent.random_words
            );
        }
        assert!(distinct.len() > 20);
    }

    #[test]
    fn tags_replay_at_the_adopted_offset() {
        let cp = CipherParameter::new(8, 32, 2, 2, 8).unwrap();
        let mut rng = RandomSource::seeded(21);
        let km = km(21);
        let sent = init_sender(&km, &cp, &mut rng, PepperDistribution::Uniform).unwrap();
        let s0 = at_offset(&bootstrap_state(&km, &cp), sent.pepper.0);
        let mut table = CollisionTable::new();
        for (i, (&r, &tag)) in sent
            .rounds
            .rounds()
            .iter()
            .zip(sent.hashes.0.iter())
            .enumerate()
        {
            let out = encrypt_block_with_rounds(
                &s0,
                None,
                &RandomWords::ZERO,
                &RoundSchedule::BOOTSTRAP,
                i as u32,
                r,
                &mut table,
                &mut (),
            );
            assert_eq!(out.tag, tag);
        }
        // no earlier offset lets the receiver halt on all 28 blocks
        let mut scanner = BootstrapScanner::new(&km, &cp);
        for p in 0..sent.pepper.0 {
            assert!(scanner
                .attempt(p, &sent.hashes, &mut Work::default())
                .is_none());
        }
    }

    #[test]
    fn sender_adopts_an_earlier_full_match() {
        // Rig the bootstrap: tags that really halt at offset 3 while the
        // sender believes it drew pepper 200.
        let cp = CipherParameter::new(8, 32, 1, 3, 8).unwrap();
        let km = km(77);
        let mut rng = RandomSource::seeded(77);
        let honest = init_sender(&km, &cp, &mut rng, PepperDistribution::Fixed(3)).unwrap();
        let bogus_draws = RoundVector::new([36; 28]).unwrap();
        let (adopted, rounds) =
            reconcile_sender(&km, &cp, Pepper(200), &honest.hashes, bogus_draws);
        let receiver = init_receiver(&km, &cp, &honest.hashes).unwrap();
        assert_eq!(adopted, receiver.pepper);
        assert!(adopted.0 <= 3);
        assert_eq!(rounds, receiver.rounds);
        assert_eq!(derive_random_words(&rounds), receiver.random_words);
    }

    #[test]
    fn wrong_key_scans_every_offset() {
        let cp = CipherParameter::new(8, 32, 2, 2, 8).unwrap();
        let mut rng = RandomSource::seeded(4);
        let mut rejected = 0;
        for seed in 0..20 {
            let sent = init_sender(&km(seed), &cp, &mut rng, PepperDistribution::Uniform).unwrap();
            let mut work = Work::default();
            match init_receiver_metered(&km(seed + 1000), &cp, &sent.hashes, &mut work) {
                Err(Error::WrongKey { offsets }) => {
                    assert_eq!(offsets, 256);
                    assert_eq!(work.offsets, 256);
                    rejected += 1;
                }
                other => panic!("wrong key accepted: {other:?}"),
            }
        }
        assert_eq!(rejected, 20);
    }

    #[test]
    fn tampered_tag_is_detected() {
        let cp = CipherParameter::new(8, 32, 2, 2, 8).unwrap();
        let mut rng = RandomSource::seeded(6);
        for seed in 0..20u64 {
            let km = km(seed);
            let sent = init_sender(&km, &cp, &mut rng, PepperDistribution::Uniform).unwrap();
            let mut hashes = sent.hashes;
            let i = (seed as usize * 7) % 28;
            hashes.0[i] = HaltTag(hashes.0[i].0 ^ (1 << (seed % 16)));
            match init_receiver(&km, &cp, &hashes) {
                Err(Error::WrongKey { .. }) => {}
                Ok(got) => assert_ne!(got.random_words, sent.random_words),
                Err(e) => panic!("{e}"),
            }
        }
    }
}
