//! Bytes on the wire versus plaintext size, computed and measured.

use freestyle::analysis::{bandwidth_overhead, overhead_bits, ASYMPTOTIC_OVERHEAD_PERCENT};
use freestyle::{encrypt_message, CipherParameter, Key, KeyMaterial, Nonce, RandomSource};

fn main() -> freestyle::Result<()> {
    let km = KeyMaterial::new(Key::from_bytes(&[1; 32])?, Nonce([2; 12]));
    let cp = CipherParameter::new(8, 32, 2, 2, 8)?;
    let mut rng = RandomSource::seeded(5);
    println!(
        "{:>10} {:>14} {:>14} {:>12}",
        "blocks", "formula bits", "frame bits", "overhead %"
    );
    for n_b in [1u64, 2, 10, 100, 1000, 10_000] {
        let msg = encrypt_message(&km, &cp, &vec![0u8; 64 * n_b as usize], &mut rng)?;
        let bits = 512 * n_b;
        println!(
            "{n_b:>10} {:>14} {:>14} {:>12.4}",
            overhead_bits(bits),
            msg.overhead_bits(),
            bandwidth_overhead(bits)?
        );
    }
    println!("long-message limit: {ASYMPTOTIC_OVERHEAD_PERCENT}%");
    Ok(())
}
