//! Key-guessing penalty across pepper sizes and pepper distributions.

use freestyle::analysis::{break_even_pepper, expected_rounds_wrong, kgp, KgpInputs};
use freestyle::PepperDistribution;

fn main() {
    println!(
        "wrong-key rounds per pepper offset: {:.6}",
        expected_rounds_wrong()
    );
    println!();
    println!(
        "{:>4} {:>14} {:>14} {:>14} {:>16}",
        "i_c", "uniform", "skew q=0.999", "skew q=0.99", "break-even E[p]"
    );
    for i_c in [8u8, 12, 16, 20, 24, 28, 32] {
        let at = |d: PepperDistribution| {
            kgp(&KgpInputs {
                i_c,
                e_pepper: d.mean(i_c),
                e_r: 20.0,
                n_b: 16,
            })
        };
        println!(
            "{i_c:>4} {:>14.4} {:>14.4} {:>14.4} {:>16.1}",
            at(PepperDistribution::Uniform),
            at(PepperDistribution::Skewed { q: 0.999 }),
            at(PepperDistribution::Skewed { q: 0.99 }),
            break_even_pepper(i_c, 20.0, 16)
        );
    }
    println!();
    println!("fixed i_c = 24, E[R] = 20, 16 blocks");
    for e in [1.0, 16.0, 256.0, 1024.0, 65536.0, 8_388_608.0] {
        println!(
            "  E[pepper] {e:>10}  KGP {:>14.4}",
            kgp(&KgpInputs {
                i_c: 24,
                e_pepper: e,
                e_r: 20.0,
                n_b: 16
            })
        );
    }
}
