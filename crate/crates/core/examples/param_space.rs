//! How many parameter tuples and ciphertexts an adversary faces.
//!
//! ```text
//! cargo run --example param_space -- 8 32
//! ```

use freestyle::analysis::{num_ciphertexts, pair_count, param_space_count, ParamGuessRange};
use freestyle::CipherParameter;

fn main() -> freestyle::Result<()> {
    let args: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let (a, b) = match args[..] {
        [a, b] => (a, b),
        _ => (8, 32),
    };
    let range = ParamGuessRange::new(a, b)?;
    print!("{}", param_space_count(&range).summary());
    println!(
        "  (R_min, R_max) pairs at h_i = 1: {}",
        pair_count(&range, 1)
    );

    let cp = CipherParameter::new(8, 32, 1, 3, 20)?;
    for n_b in [1u32, 16, 1024] {
        let n = num_ciphertexts(&cp, n_b);
        println!(
            "distinct ciphertexts of a {n_b}-block message: about 2^{}",
            n.bits() - 1
        );
    }
    Ok(())
}
