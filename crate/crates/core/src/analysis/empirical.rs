//! Measured counterparts of the cost model: wrong-key rounds per pepper
//! offset, and the key-guessing penalty observed on real decryptions.

use std::time::{Duration, Instant};

use serde::Serialize;

use super::kgp::{kgp, KgpInputs};
use crate::entropy::{PepperDistribution, RandomSource};
use crate::error::{Error, Result};
use crate::hash::HaltTag;
use crate::init::{BootstrapScanner, InitHashes, Work, BOOTSTRAP_BLOCKS};
use crate::state::{CipherParameter, Key, KeyMaterial, Nonce};
use crate::stream::{decrypt_message_metered, encrypt_message_with};

fn random_km(rng: &mut RandomSource) -> Result<KeyMaterial> {
    let mut key = [0u8; 32];
    let mut nonce = [0u8; 12];
    rng.fill_bytes(&mut key)?;
    rng.fill_bytes(&mut nonce)?;
    Ok(KeyMaterial::new(Key::from_bytes(&key)?, Nonce(nonce)))
}

/// Mean rounds a wrong key spends at one pepper offset, measured on the
/// cipher itself: random key, random tags, one bootstrap attempt per trial.
pub fn simulate_wrong_rounds(trials: u64, seed: u64) -> Result<f64> {
    let mut rng = RandomSource::seeded(seed);
    let cp = CipherParameter::new(12, 36, 1, 3, 8)?;
    let mut scanner = BootstrapScanner::new(&random_km(&mut rng)?, &cp);
    let mut work = Work::default();
    for _ in 0..trials {
        scanner.rekey(&random_km(&mut rng)?, &cp);
        let mut tags = [HaltTag(0); BOOTSTRAP_BLOCKS];
        for t in tags.iter_mut() {
            *t = HaltTag(rng.next_u32()? as u16);
        }
        let _ = scanner.attempt(0, &InitHashes(tags), &mut work);
    }
    Ok(work.rounds as f64 / trials as f64)
}

#[derive(Clone, Debug, Serialize)]
pub struct EmpiricalKgp {
    pub trials: u32,
    pub i_c: u8,
    pub n_b: u64,
    pub mean_pepper: f64,
    pub mean_wrong_rounds: f64,
    pub mean_correct_rounds: f64,
    /// Ratio of mean rounds, wrong key over correct key.
    pub rounds_ratio: f64,
    /// Ratio of mean wall time, wrong key over correct key.
    pub time_ratio: f64,
    pub wrong_rounds_per_offset: f64,
    /// Model prediction for the same inputs.
    pub analytical: f64,
}

/// Encrypts `trials` random `n_b`-block messages, decrypts each once with the
/// right key and once with a random wrong key, and compares the cost.
pub fn empirical_kgp(
    cp: &CipherParameter,
    n_b: u64,
    trials: u32,
    dist: PepperDistribution,
    seed: u64,
) -> Result<EmpiricalKgp> {
    let mut rng = RandomSource::seeded(seed);
    let mut wrong = Work::default();
    let mut correct = Work::default();
    let mut wrong_time = Duration::ZERO;
    let mut correct_time = Duration::ZERO;
    let mut pepper_sum = 0u64;
    let mut message = vec![0u8; n_b as usize * 64];
    for _ in 0..trials {
        let km = random_km(&mut rng)?;
        rng.fill_bytes(&mut message)?;
        let enc = encrypt_message_with(&km, cp, &message, &mut rng, dist)?;

        let mut c = Work::default();
        let start = Instant::now();
        decrypt_message_metered(&km.key, &enc, &mut c)?;
        correct_time += start.elapsed();
        // the genuine scan stops at the pepper, having examined pepper + 1 offsets
        pepper_sum += c.offsets - 1;
        correct += c;

        let start = Instant::now();
        match decrypt_message_metered(&random_km(&mut rng)?.key, &enc, &mut wrong) {
            Err(Error::WrongKey { .. }) | Ok(_) => {}
            Err(e) => return Err(e),
        }
        wrong_time += start.elapsed();
    }
    let t = f64::from(trials);
    let mean_wrong = wrong.rounds as f64 / t;
    let mean_correct = correct.rounds as f64 / t;
    let e_r = (f64::from(cp.r_min()) + f64::from(cp.r_max())) / 2.0;
    let analytical = kgp(&KgpInputs {
        i_c: cp.i_c(),
        e_pepper: dist.mean(cp.i_c()),
        e_r,
        n_b,
    });
    Ok(EmpiricalKgp {
        trials,
        i_c: cp.i_c(),
        n_b,
        mean_pepper: pepper_sum as f64 / t,
        mean_wrong_rounds: mean_wrong,
        mean_correct_rounds: mean_correct,
        rounds_ratio: mean_wrong / mean_correct,
        time_ratio: wrong_time.as_secs_f64() / correct_time.as_secs_f64(),
        wrong_rounds_per_offset: wrong.rounds as f64 / wrong.offsets as f64,
        analytical,
    })
}
