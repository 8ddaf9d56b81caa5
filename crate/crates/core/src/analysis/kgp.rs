//! Wrong-key cost model: per-trial tag collision probability, expected
//! rounds spent per wrong pepper offset, and the key-guessing penalty.
//!
//! All hashes at a given trial are treated as equally likely, which is the
//! approximation the cost model is built on.

use crate::error::{Error, Result};
use crate::init::BOOTSTRAP_BLOCKS;
use crate::state::RoundSchedule;

const TAG_SPACE: f64 = 65536.0;

/// Rounds a genuine receiver spends on the 28 bootstrap blocks at the right
/// offset: 28 blocks at 24 expected rounds.
pub const BOOTSTRAP_CORRECT_ROUNDS: f64 = 28.0 * 24.0;

/// Probability that a wrong key produces the expected tag at the `n`-th
/// checkpoint, given tags are drawn without replacement.
pub fn pr_collision(n: u32) -> Result<f64> {
    if n == 0 || n > 1 << 16 {
        return Err(Error::Domain(format!("trial index {n} outside [1, 65536]")));
    }
    if n == 1 {
        return Ok(1.0 / TAG_SPACE);
    }
    let survive: f64 = (0..n)
        .map(|i| (TAG_SPACE - f64::from(i) - 1.0) / (TAG_SPACE - f64::from(i)))
        .product();
    Ok(survive / (TAG_SPACE - f64::from(n) + 1.0))
}

/// `sum_{n=1}^{n_r} Pr_n`: chance a wrong key halts somewhere in one block.
pub fn collision_mass(n_r: u32) -> f64 {
    (1..=n_r)
        .map(|n| pr_collision(n).expect("n_r <= 65536"))
        .sum()
}

/// Expected rounds per wrong pepper offset under the bootstrap schedule.
pub fn expected_rounds_wrong() -> f64 {
    expected_rounds_wrong_with(&RoundSchedule::BOOTSTRAP, |n| {
        pr_collision(n).expect("n_r <= 65536")
    })
}

/// The same expectation for an arbitrary schedule and per-trial collision
/// probability. Each of the 28 bootstrap blocks is attempted only if every
/// earlier one halted; a block halting at trial `n` costs `r_min + n*h_i`
/// rounds and a miss costs `r_max`.
pub fn expected_rounds_wrong_with(schedule: &RoundSchedule, pr: impl Fn(u32) -> f64) -> f64 {
    let n_r = schedule.round_choices();
    let probs: Vec<f64> = (1..=n_r).map(&pr).collect();
    let mass: f64 = probs.iter().sum();
    let hit: f64 = probs
        .iter()
        .enumerate()
        .map(|(i, p)| f64::from(schedule.r_min() + (i as u32 + 1) * schedule.h_i()) * p)
        .sum();
    let per_block = hit + f64::from(schedule.r_max()) * (1.0 - mass);
    (0..BOOTSTRAP_BLOCKS as i32)
        .map(|h| mass.powi(h))
        .sum::<f64>()
        * per_block
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KgpInputs {
    /// Pepper bits.
    pub i_c: u8,
    /// Expected pepper chosen by the sender.
    pub e_pepper: f64,
    /// Expected rounds per message block for the genuine receiver.
    pub e_r: f64,
    /// Message blocks.
    pub n_b: u64,
}

impl KgpInputs {
    pub fn uniform(i_c: u8, e_r: f64, n_b: u64) -> Self {
        Self {
            i_c,
            e_pepper: (1u64 << (i_c - 1)) as f64,
            e_r,
            n_b,
        }
    }

    fn genuine_rounds(&self, e_rw: f64) -> f64 {
        self.e_pepper * e_rw + BOOTSTRAP_CORRECT_ROUNDS + self.n_b as f64 * self.e_r
    }
}

/// Key-guessing penalty, neglecting the 10^-96 chance a wrong key survives
/// the bootstrap: `2^i_c E_Rw / (E_pepper E_Rw + 672 + N_b E_R)`.
pub fn kgp(inputs: &KgpInputs) -> f64 {
    let e_rw = expected_rounds_wrong();
    (1u64 << inputs.i_c) as f64 * e_rw / inputs.genuine_rounds(e_rw)
}

/// Key-guessing penalty including the wrong key's chance of passing all 28
/// bootstrap tags and decrypting one block.
pub fn kgp_with_false_accept(inputs: &KgpInputs) -> f64 {
    let e_rw = expected_rounds_wrong();
    let leak =
        collision_mass(RoundSchedule::BOOTSTRAP.round_choices()).powi(BOOTSTRAP_BLOCKS as i32);
    ((1u64 << inputs.i_c) as f64 * e_rw + inputs.e_r * leak) / inputs.genuine_rounds(e_rw)
}

/// Largest expected pepper that still gives a penalty above 1:
/// `2^i_c - (672 + N_b E_R) / E_Rw`.
pub fn break_even_pepper(i_c: u8, e_r: f64, n_b: u64) -> f64 {
    (1u64 << i_c) as f64 - (BOOTSTRAP_CORRECT_ROUNDS + n_b as f64 * e_r) / expected_rounds_wrong()
}
