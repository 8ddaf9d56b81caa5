//! Encryption and decryption of a single 64-byte block with a randomly
//! chosen round count and a hash-based halting condition.

use crate::entropy::RandomSource;
use crate::error::Result;
use crate::hash::{compute_hash, CollisionTable, HaltTag};
use crate::state::{keystream, CipherState, RandomWords, RoundSchedule, BLOCK_LEN};

/// Receives every post-probe checkpoint tag of a block operation.
pub trait CheckpointObserver {
    fn checkpoint(&mut self, round: u32, tag: HaltTag);
}

impl CheckpointObserver for () {
    #[inline(always)]
    fn checkpoint(&mut self, _round: u32, _tag: HaltTag) {}
}

impl CheckpointObserver for Vec<(u32, HaltTag)> {
    fn checkpoint(&mut self, round: u32, tag: HaltTag) {
        self.push((round, tag));
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EncryptOutcome {
    /// Rounds the block was encrypted with.
    pub rounds: u32,
    /// Tag emitted at the final round.
    pub tag: HaltTag,
    /// Hash evaluations performed.
    pub checkpoints: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecryptOutcome {
    /// Round at which the expected tag matched, or 0 if it never did.
    pub rounds: u32,
    /// Rounds actually executed: `rounds` on a match, `r_max` otherwise.
    pub rounds_executed: u32,
    pub checkpoints: u32,
}

impl DecryptOutcome {
    pub fn halted(&self) -> bool {
        self.rounds != 0
    }
}

fn block_start(s0: &CipherState, rw: &RandomWords, counter: u32) -> CipherState {
    let mut start = *s0;
    start.0[12] = counter ^ rw.0[3];
    start
}

fn xor_keystream(data: &mut [u8], start: &CipherState, last: &CipherState) {
    debug_assert!(data.len() <= BLOCK_LEN);
    let ks = keystream(start, last);
    for (d, k) in data.iter_mut().zip(ks.iter()) {
        *d ^= k;
    }
}

/// Encrypts `data` in place (at most 64 bytes). With `data = None` only the
/// round count and tag are produced, which is how the bootstrap uses it.
pub fn encrypt_block(
    s0: &CipherState,
    data: Option<&mut [u8]>,
    rw: &RandomWords,
    schedule: &RoundSchedule,
    counter: u32,
    rng: &mut RandomSource,
    table: &mut CollisionTable,
) -> Result<EncryptOutcome> {
    encrypt_block_observed(s0, data, rw, schedule, counter, rng, table, &mut ())
}

#[allow(clippy::too_many_arguments)]
pub fn encrypt_block_observed<O: CheckpointObserver>(
    s0: &CipherState,
    data: Option<&mut [u8]>,
    rw: &RandomWords,
    schedule: &RoundSchedule,
    counter: u32,
    rng: &mut RandomSource,
    table: &mut CollisionTable,
    observer: &mut O,
) -> Result<EncryptOutcome> {
    let k = rng.uniform(0, schedule.round_choices() - 1)?;
    let rounds = schedule.round_at(k);
    Ok(encrypt_block_with_rounds(
        s0, data, rw, schedule, counter, rounds, table, observer,
    ))
}

/// Encryption with a caller-chosen round count. `rounds` must be a
/// checkpoint round of `schedule`.
#[allow(clippy::too_many_arguments)]
pub fn encrypt_block_with_rounds<O: CheckpointObserver>(
    s0: &CipherState,
    data: Option<&mut [u8]>,
    rw: &RandomWords,
    schedule: &RoundSchedule,
    counter: u32,
    rounds: u32,
    table: &mut CollisionTable,
    observer: &mut O,
) -> EncryptOutcome {
    debug_assert!(rounds <= schedule.r_max() && schedule.is_checkpoint(rounds));
    table.reset();
    let start = block_start(s0, rw, counter);
    let mut state = start;
    let mut tag = HaltTag(0);
    let mut checkpoints = 0;
    for r in 1..=rounds {
        state.round(r);
        if schedule.is_checkpoint(r) {
            tag = table.probe(compute_hash(&state, r, rw, tag, schedule.h_c()));
            table.mark(tag);
            checkpoints += 1;
            observer.checkpoint(r, tag);
        }
    }
    if let Some(data) = data {
        xor_keystream(data, &start, &state);
    }
    EncryptOutcome {
        rounds,
        tag,
        checkpoints,
    }
}

/// Runs rounds until a checkpoint reproduces `expected` or `r_max` is
/// reached. On a match `data`, if given, is decrypted in place; otherwise it
/// is left untouched and the outcome reports zero rounds.
pub fn decrypt_block(
    s0: &CipherState,
    data: Option<&mut [u8]>,
    expected: HaltTag,
    rw: &RandomWords,
    schedule: &RoundSchedule,
    counter: u32,
    table: &mut CollisionTable,
) -> DecryptOutcome {
    decrypt_block_observed(s0, data, expected, rw, schedule, counter, table, &mut ())
}

#[allow(clippy::too_many_arguments)]
pub fn decrypt_block_observed<O: CheckpointObserver>(
    s0: &CipherState,
    data: Option<&mut [u8]>,
    expected: HaltTag,
    rw: &RandomWords,
    schedule: &RoundSchedule,
    counter: u32,
    table: &mut CollisionTable,
    observer: &mut O,
) -> DecryptOutcome {
    table.reset();
    let start = block_start(s0, rw, counter);
    let mut state = start;
    let mut tag = HaltTag(0);
    let mut checkpoints = 0;
    for r in 1..=schedule.r_max() {
        state.round(r);
        if schedule.is_checkpoint(r) {
            tag = table.probe(compute_hash(&state, r, rw, tag, schedule.h_c()));
            checkpoints += 1;
            observer.checkpoint(r, tag);
            if tag == expected {
                if let Some(data) = data {
                    xor_keystream(data, &start, &state);
                }
                return DecryptOutcome {
                    rounds: r,
                    rounds_executed: r,
                    checkpoints,
                };
            }
            table.mark(tag);
        }
    }
    DecryptOutcome {
        rounds: 0,
        rounds_executed: schedule.r_max(),
        checkpoints,
    }
}
