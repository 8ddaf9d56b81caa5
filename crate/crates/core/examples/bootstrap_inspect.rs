//! Run the per-message bootstrap by hand: the sender draws a pepper and 28
//! round counts, the receiver recovers both by scanning pepper offsets.

use freestyle::init::{init_receiver_metered, init_sender, Work};
use freestyle::{CipherParameter, Key, KeyMaterial, Nonce, PepperDistribution, RandomSource};

fn main() -> freestyle::Result<()> {
    let km = KeyMaterial::new(Key::from_bytes(&[0xa5; 32])?, Nonce([7; 12]));
    let cp = CipherParameter::new(8, 32, 2, 2, 12)?;
    let mut rng = RandomSource::seeded(2024);

    let sent = init_sender(&km, &cp, &mut rng, PepperDistribution::Uniform)?;
    println!("drawn pepper    {}", sent.drawn_pepper.0);
    println!("adopted pepper  {}", sent.pepper.0);
    println!("round counts    {:?}", sent.rounds.rounds());
    let tags: Vec<String> = sent
        .hashes
        .0
        .iter()
        .map(|t| format!("{:04x}", t.0))
        .collect();
    println!("bootstrap tags  {}", tags.join(" "));
    println!("random words    {:08x?}", sent.random_words.0);

    let mut work = Work::default();
    let got = init_receiver_metered(&km, &cp, &sent.hashes, &mut work)?;
    assert_eq!(got.random_words, sent.random_words);
    println!(
        "receiver found pepper {} after {} offsets, {} rounds",
        got.pepper.0, work.offsets, work.rounds
    );

    let wrong = KeyMaterial::new(Key::from_bytes(&[0x5a; 32])?, Nonce([7; 12]));
    let mut wasted = Work::default();
    let err = init_receiver_metered(&wrong, &cp, &sent.hashes, &mut wasted).unwrap_err();
    println!("{err}");
    println!(
        "  {} offsets, {:.3} rounds per offset",
        wasted.offsets,
        wasted.rounds as f64 / wasted.offsets as f64
    );
    Ok(())
}
