//! Random draws for round counts and peppers.
//!
//! The system source is a ChaCha20 generator keyed from the operating
//! system, in the spirit of `arc4random`. The seeded source is fully
//! reproducible and meant for tests, benchmarks and golden transcripts.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::init::Pepper;

enum Inner {
    System(ChaCha20Rng),
    Seeded(ChaCha20Rng),
    /// Fails every draw. Used to exercise the entropy error path.
    Failing,
}

pub struct RandomSource {
    inner: Inner,
}

impl std::fmt::Debug for RandomSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mode = match self.inner {
            Inner::System(_) => "system",
            Inner::Seeded(_) => "seeded",
            Inner::Failing => "failing",
        };
        f.debug_struct("RandomSource").field("mode", &mode).finish()
    }
}

impl RandomSource {
    pub fn system() -> Result<Self> {
        let rng = ChaCha20Rng::try_from_os_rng().map_err(|e| Error::Entropy(e.to_string()))?;
        Ok(Self {
            inner: Inner::System(rng),
        })
    }

    pub fn seeded(seed: u64) -> Self {
        Self {
            inner: Inner::Seeded(ChaCha20Rng::seed_from_u64(seed)),
        }
    }

    pub fn failing() -> Self {
        Self {
            inner: Inner::Failing,
        }
    }

    pub fn is_seeded(&self) -> bool {
        matches!(self.inner, Inner::Seeded(_))
    }

    fn rng(&mut self) -> Result<&mut ChaCha20Rng> {
        match &mut self.inner {
            Inner::System(r) | Inner::Seeded(r) => Ok(r),
            Inner::Failing => Err(Error::Entropy("source exhausted".into())),
        }
    }

    pub fn next_u32(&mut self) -> Result<u32> {
        Ok(self.rng()?.next_u32())
    }

    pub fn next_u64(&mut self) -> Result<u64> {
        Ok(self.rng()?.next_u64())
    }

    pub fn fill_bytes(&mut self, dest: &mut [u8]) -> Result<()> {
        self.rng()?.fill_bytes(dest);
        Ok(())
    }

    /// Uniform integer in `[lo, hi]` by rejection sampling.
    pub fn uniform(&mut self, lo: u32, hi: u32) -> Result<u32> {
        assert!(lo <= hi, "empty range [{lo}, {hi}]");
        let span = u64::from(hi - lo) + 1;
        if span == 1 << 32 {
            return self.next_u32();
        }
        // largest multiple of span that fits in 2^32
        let zone = (1u64 << 32) - (1u64 << 32) % span;
        loop {
            let x = u64::from(self.next_u32()?);
            if x < zone {
                return Ok(lo + (x % span) as u32);
            }
        }
    }

    /// Uniform real in `[0, 1)` with 53 bits of precision.
    pub fn unit_f64(&mut self) -> Result<f64> {
        Ok((self.next_u64()? >> 11) as f64 * (1.0 / (1u64 << 53) as f64))
    }

    /// Truncated geometric pepper: `Pr(p) ∝ q^p` over `[0, 2^i_c)`.
    pub fn skewed_pepper(&mut self, i_c: u8, q: f64) -> Result<Pepper> {
        assert!((8..=32).contains(&i_c), "i_c = {i_c} outside [8, 32]");
        assert!(q > 0.0 && q < 1.0, "skew q = {q} outside (0, 1)");
        let n = (1u64 << i_c) as f64;
        let ln_q = q.ln();
        // inverse CDF: F(p) = (1 - q^(p+1)) / (1 - q^n)
        let mass = -(n * ln_q).exp_m1();
        let u = self.unit_f64()?;
        let p = ((-u * mass).ln_1p() / ln_q).floor();
        let max = (1u64 << i_c) - 1;
        Ok(Pepper(if p.is_finite() && p >= 0.0 {
            (p as u64).min(max) as u32
        } else {
            0
        }))
    }

    pub fn pepper(&mut self, i_c: u8, dist: PepperDistribution) -> Result<Pepper> {
        let max = ((1u64 << i_c) - 1) as u32;
        match dist {
            PepperDistribution::Uniform => Ok(Pepper(self.uniform(0, max)?)),
            PepperDistribution::Skewed { q } => self.skewed_pepper(i_c, q),
            PepperDistribution::Fixed(p) => Ok(Pepper(p.min(max))),
        }
    }
}

/// How the sender picks its pepper. Never transmitted.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PepperDistribution {
    Uniform,
    /// Truncated geometric with ratio `q` in `(0, 1)`; smaller `q` favours
    /// small peppers and raises the key-guessing penalty.
    Skewed {
        q: f64,
    },
    /// Always the given pepper, clamped to `2^i_c - 1`. For analysis only.
    Fixed(u32),
}

impl PepperDistribution {
    /// Expected pepper over `[0, 2^i_c)`.
    pub fn mean(&self, i_c: u8) -> f64 {
        let n = (1u64 << i_c) as f64;
        match *self {
            PepperDistribution::Uniform => (n - 1.0) / 2.0,
            PepperDistribution::Skewed { q } => {
                // sum p q^p / sum q^p over [0, n)
                q / (1.0 - q) - n / (-n * q.ln()).exp_m1()
            }
            PepperDistribution::Fixed(p) => f64::from(p).min(n - 1.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_range() {
        let mut r = RandomSource::seeded(0);
        for _ in 0..100 {
            assert_eq!(r.uniform(12, 12).unwrap(), 12);
        }
        let _ = r.uniform(0, u32::MAX).unwrap();
    }

    #[test]
    fn seeded_is_reproducible() {
        let mut a = RandomSource::seeded(42);
        let mut b = RandomSource::seeded(42);
        let xs: Vec<u32> = (0..64).map(|_| a.uniform(12, 36).unwrap()).collect();
        let ys: Vec<u32> = (0..64).map(|_| b.uniform(12, 36).unwrap()).collect();
        assert_eq!(xs, ys);
        assert!(xs.iter().all(|x| (12..=36).contains(x)));
    }

    #[test]
    fn uniform_frequencies_within_five_sigma() {
        let mut r = RandomSource::seeded(7);
        let draws = 1_000_000u32;
        let mut counts = [0u32; 25];
        for _ in 0..draws {
            counts[(r.uniform(12, 36).unwrap() - 12) as usize] += 1;
        }
        let p = 1.0 / 25.0;
        let mean = f64::from(draws) * p;
        let sigma = (f64::from(draws) * p * (1.0 - p)).sqrt();
        for (v, &c) in counts.iter().enumerate() {
            assert!(
                (f64::from(c) - mean).abs() < 5.0 * sigma,
                "value {} count {c}",
                v + 12
            );
        }
    }

    #[test]
    fn skewed_mean_matches_closed_form() {
        let mut r = RandomSource::seeded(11);
        let n = 100_000;
        let mut sum = 0u64;
        for _ in 0..n {
            let p = r.skewed_pepper(8, 0.5).unwrap().0;
            assert!(p < 256);
            sum += u64::from(p);
        }
        let mean = sum as f64 / n as f64;
        let expected = PepperDistribution::Skewed { q: 0.5 }.mean(8);
        assert!((expected - 1.0).abs() < 1e-9);
        assert!((mean - expected).abs() < 0.1, "{mean}");
    }

    #[test]
    fn skew_near_one_is_nearly_uniform() {
        let mut r = RandomSource::seeded(12);
        let n = 100_000;
        let q = 1.0 - 1e-9;
        let mean = (0..n)
            .map(|_| r.skewed_pepper(12, q).unwrap().0 as f64)
            .sum::<f64>()
            / n as f64;
        let half = 2048.0;
        assert!((mean - half).abs() / half < 0.02, "{mean}");
        assert!((PepperDistribution::Skewed { q }.mean(12) - 2047.5).abs() < 0.1);
        // skewed mean stays below the uniform one
        assert!(PepperDistribution::Skewed { q: 0.999 }.mean(12) < half);
    }

    #[test]
    fn failing_source_reports_entropy_error() {
        let mut r = RandomSource::failing();
        assert!(matches!(r.uniform(1, 2), Err(Error::Entropy(_))));
        assert!(matches!(
            r.pepper(8, PepperDistribution::Uniform),
            Err(Error::Entropy(_))
        ));
    }
}
