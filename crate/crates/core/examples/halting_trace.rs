//! Follow one block through its checkpoints: the sender stops at a random
//! round, and the receiver walks forward until its hash matches the tag.

use freestyle::hash::CollisionTable;
use freestyle::state::build_initial_state;
use freestyle::stream::block::{decrypt_block_observed, encrypt_block_with_rounds};
use freestyle::{CipherParameter, HaltTag, Key, KeyMaterial, Nonce, RandomWords};

fn main() -> freestyle::Result<()> {
    let km = KeyMaterial::new(Key::from_bytes(&[3; 32])?, Nonce([9; 12]));
    let cp = CipherParameter::new(8, 32, 4, 2, 20)?;
    let rw = RandomWords([0xdead_beef, 1, 2, 3]);
    let s0 = build_initial_state(&km, &cp, &rw);
    let schedule = cp.schedule();

    let mut block = *b"sixty-four bytes of plaintext, padded out to a full cipher block";
    let mut table = CollisionTable::new();
    let mut sender: Vec<(u32, HaltTag)> = Vec::new();
    let enc = encrypt_block_with_rounds(
        &s0,
        Some(&mut block),
        &rw,
        &schedule,
        0,
        24,
        &mut table,
        &mut sender,
    );
    println!(
        "sender ran {} rounds, sent tag {:04x}",
        enc.rounds, enc.tag.0
    );
    for (r, t) in &sender {
        println!("  checkpoint r={r:<3} tag {:04x}", t.0);
    }

    let mut trace: Vec<(u32, HaltTag)> = Vec::new();
    let dec = decrypt_block_observed(
        &s0,
        Some(&mut block),
        enc.tag,
        &rw,
        &schedule,
        0,
        &mut table,
        &mut trace,
    );
    println!(
        "receiver halted at round {} after {} checkpoints",
        dec.rounds, dec.checkpoints
    );
    println!("plaintext: {}", String::from_utf8_lossy(&block));
    Ok(())
}
