//! Measure the key-guessing penalty on real decryptions and set it beside
//! the model.
//!
//! ```text
//! cargo run --release --example empirical_kgp -- [i_c] [trials]
//! ```

use freestyle::analysis::{empirical_kgp, expected_rounds_wrong, simulate_wrong_rounds};
use freestyle::{CipherParameter, PepperDistribution};

fn main() -> freestyle::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u32>().ok());
    let i_c = args.next().flatten().unwrap_or(10) as u8;
    let trials = args.next().flatten().unwrap_or(200);

    let mc = simulate_wrong_rounds(200_000, 1)?;
    println!(
        "wrong-key rounds per offset: simulated {mc:.4}, model {:.4}",
        expected_rounds_wrong()
    );

    let cp = CipherParameter::new(8, 32, 1, 3, i_c)?;
    for (label, dist) in [
        ("uniform", PepperDistribution::Uniform),
        ("skewed q=0.99", PepperDistribution::Skewed { q: 0.99 }),
        ("fixed max", PepperDistribution::Fixed(u32::MAX)),
    ] {
        let r = empirical_kgp(&cp, 1, trials, dist, 7)?;
        println!(
            "{label:<14} mean pepper {:>8.1}  rounds ratio {:>8.4}  time ratio {:>8.4}  model {:>8.4}",
            r.mean_pepper, r.rounds_ratio, r.time_ratio, r.analytical
        );
    }
    Ok(())
}
