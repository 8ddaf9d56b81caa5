//! Exact counting: distinct ciphertexts per message, parameter-space size
//! for an adversary guessing the round bounds, and bandwidth overhead.

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::CipherParameter;

/// `2^128 * N_r^N_b`.
pub fn num_ciphertexts(cp: &CipherParameter, n_b: u32) -> BigUint {
    (BigUint::from(1u32) << 128u32) * BigUint::from(cp.round_choices()).pow(n_b)
}

/// Blocks needed for a message of `message_bits` bits.
pub fn block_count(message_bits: u64) -> u64 {
    message_bits.div_ceil(512)
}

/// Adversary's guess that both round bounds lie in `[a, b]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ParamGuessRange {
    a: u32,
    b: u32,
}

impl ParamGuessRange {
    pub fn new(a: u32, b: u32) -> Result<Self> {
        if a == 0 || a > b || b > u32::from(u16::MAX) {
            return Err(Error::Domain(format!(
                "guess range [{a}, {b}] must satisfy 1 <= a <= b <= 65535"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn b(&self) -> u32 {
        self.b
    }
}

/// Number of `(R_min, R_max)` pairs with fixed `h_i`:
/// `((b-a)/h_i + 1)((b-a)/h_i + 2)/2`.
pub fn pair_count(g: &ParamGuessRange, h_i: u32) -> u64 {
    let k = u64::from((g.b - g.a) / h_i);
    (k + 1) * (k + 2) / 2
}

pub const PUBLISHED_COUNT_8_32: u64 = 42525;
const H_C_CHOICES: u64 = 3;
const I_C_CHOICES: u64 = 25;

/// Both counts of the cipher-parameter space, side by side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParamSpaceReport {
    pub range: ParamGuessRange,
    /// The triple sum over `n <= m` and common factors `h` of
    /// `75/2 ((m-n)/h + 1)((m-n)/h + 2)` taken at face value.
    #[serde(serialize_with = "decimal")]
    pub literal: BigUint,
    /// Direct count of valid `(R_min, R_max, H_I, H_C, I_C)` tuples.
    #[serde(serialize_with = "decimal")]
    pub enumerated: BigUint,
    /// Published figure, when `range` is `[8, 32]`.
    pub claimed: Option<u64>,
}

impl ParamSpaceReport {
    pub fn literal_matches_claim(&self) -> Option<bool> {
        self.claimed.map(|c| self.literal == BigUint::from(c))
    }

    pub fn enumerated_matches_claim(&self) -> Option<bool> {
        self.claimed.map(|c| self.enumerated == BigUint::from(c))
    }

    pub fn counts_agree(&self) -> bool {
        self.literal == self.enumerated
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "guess range [{}, {}]\n  literal triple sum : {}\n  enumerated tuples  : {}\n",
            self.range.a, self.range.b, self.literal, self.enumerated
        );
        if !self.counts_agree() {
            s.push_str("  the two counts DISAGREE\n");
        }
        if let Some(c) = self.claimed {
            let tick = |m: Option<bool>| {
                if m == Some(true) {
                    "matches"
                } else {
                    "does not match"
                }
            };
            s.push_str(&format!(
                "  published 42525    : literal {}, enumeration {} (claim {c})\n",
                tick(self.literal_matches_claim()),
                tick(self.enumerated_matches_claim())
            ));
        }
        s
    }
}

fn decimal<S: serde::Serializer>(n: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn common_factors(n: u32, m: u32) -> impl Iterator<Item = u32> {
    let g = gcd(n, m);
    (1..=g).filter(move |d| g.is_multiple_of(*d))
}

pub fn param_space_count(g: &ParamGuessRange) -> ParamSpaceReport {
    let mut literal_twice = BigUint::from(0u32);
    let mut tuples = 0u64;
    for n in g.a..=g.b {
        for m in n..=g.b {
            for h in common_factors(n, m) {
                let k = u64::from((m - n) / h);
                literal_twice += BigUint::from(75 * (k + 1) * (k + 2));
                tuples += H_C_CHOICES * I_C_CHOICES;
            }
        }
    }
    ParamSpaceReport {
        range: *g,
        literal: literal_twice / 2u32,
        enumerated: BigUint::from(tuples),
        claimed: (g.a == 8 && g.b == 32).then_some(PUBLISHED_COUNT_8_32),
    }
}

/// Overhead of one message in bits: one tag per block plus 28 bootstrap
/// tags and the 64-bit parameter.
pub fn overhead_bits(message_bits: u64) -> u64 {
    16 * block_count(message_bits) + 512
}

/// `(16 N_b + 512) / |message| * 100`.
pub fn bandwidth_overhead(message_bits: u64) -> Result<f64> {
    if message_bits == 0 {
        return Err(Error::Domain(
            "bandwidth overhead of an empty message".into(),
        ));
    }
    Ok(overhead_bits(message_bits) as f64 * 100.0 / message_bits as f64)
}

/// Limit of the overhead for long messages: 16 bits per 512-bit block.
pub const ASYMPTOTIC_OVERHEAD_PERCENT: f64 = 3.125;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ciphertext_counts() {
        let cp = CipherParameter::new(8, 32, 1, 3, 20).unwrap();
        assert_eq!(cp.round_choices(), 25);
        let two128 = BigUint::from(1u32) << 128u32;
        assert_eq!(num_ciphertexts(&cp, 0), two128);
        assert_eq!(num_ciphertexts(&cp, 2), &two128 * 625u32);
        let fixed = CipherParameter::new(20, 20, 20, 3, 20).unwrap();
        for n_b in [0, 1, 100] {
            assert_eq!(num_ciphertexts(&fixed, n_b), two128);
        }
    }

    #[test]
    fn pair_counting() {
        assert_eq!(pair_count(&ParamGuessRange::new(8, 32).unwrap(), 1), 325);
        assert!(ParamGuessRange::new(9, 8).is_err());
    }

    #[test]
    fn single_pair_enumeration() {
        for a in [1u32, 8, 12, 36] {
            let r = param_space_count(&ParamGuessRange::new(a, a).unwrap());
            let divisors = (1..=a).filter(|d| a % d == 0).count() as u64;
            assert_eq!(r.enumerated, BigUint::from(75 * divisors));
            assert_eq!(r.claimed, None);
        }
    }

    #[test]
    fn published_count_for_8_32() {
        let r = param_space_count(&ParamGuessRange::new(8, 32).unwrap());
        assert_eq!(r.enumerated, BigUint::from(42525u32));
        assert_eq!(r.literal, BigUint::from(1_729_950u32));
        assert_eq!(r.enumerated_matches_claim(), Some(true));
        assert_eq!(r.literal_matches_claim(), Some(false));
        assert!(!r.counts_agree());
        assert!(r.summary().contains("DISAGREE"));
    }

    #[test]
    fn overhead_values() {
        assert!((bandwidth_overhead(512 * 1000).unwrap() - 3.225).abs() < 1e-12);
        assert!((bandwidth_overhead(512).unwrap() - 103.125).abs() < 1e-12);
        let big = bandwidth_overhead(512 * 10_000_000).unwrap();
        assert!((big - ASYMPTOTIC_OVERHEAD_PERCENT).abs() < 1e-4);
        assert!(bandwidth_overhead(0).is_err());
    }
}
