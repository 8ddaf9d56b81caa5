//! With random words zero, a zero packed parameter and exactly 20 rounds the
//! cipher's keystream is ChaCha20's. Compare against the reference block
//! function on random inputs.

use freestyle::analysis::chacha20_block;
use freestyle::state::keystream;
use freestyle::{CipherState, Key, KeyMaterial, Nonce, RandomSource, RandomWords};

fn main() -> freestyle::Result<()> {
    let mut rng = RandomSource::seeded(8439);
    let mut matches = 0;
    for _ in 0..1000 {
        let mut key = [0u8; 32];
        let mut nonce = [0u8; 12];
        rng.fill_bytes(&mut key)?;
        rng.fill_bytes(&mut nonce)?;
        let counter = rng.next_u32()?;
        let km = KeyMaterial::new(Key::from_bytes(&key)?, Nonce(nonce)).with_counter(counter);
        let s0 = CipherState::initial(&km, 0, &RandomWords::ZERO);
        let mut s = s0;
        for r in 1..=20 {
            s.round(r);
        }
        if keystream(&s0, &s) == chacha20_block(&key, &nonce, counter) {
            matches += 1;
        }
    }
    println!("{matches}/1000 keystream blocks identical to ChaCha20");
    println!(
        "zero-input block: {}",
        hex::encode(chacha20_block(&[0; 32], &[0; 12], 0))
    );
    Ok(())
}
