//! Cost model, counting, benchmarks and a reference ChaCha20.

pub mod bench;
pub mod chacha;
pub mod counting;
pub mod empirical;
pub mod kgp;

pub use bench::{bench, BenchConfig, BenchOptions, BenchReport, BenchRow};
pub use chacha::{chacha20_block, chacha20_xor};
pub use counting::{
    bandwidth_overhead, block_count, num_ciphertexts, overhead_bits, pair_count, param_space_count,
    ParamGuessRange, ParamSpaceReport, ASYMPTOTIC_OVERHEAD_PERCENT,
};
pub use empirical::{empirical_kgp, simulate_wrong_rounds, EmpiricalKgp};
pub use kgp::{
    break_even_pepper, collision_mass, expected_rounds_wrong, kgp, kgp_with_false_accept,
    pr_collision, KgpInputs,
};
