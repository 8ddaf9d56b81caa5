//! Stream a file through encryption and decryption 64 bytes at a time.
//!
//! ```text
//! cargo run --example streaming_file -- [path]
//! ```
//! Without a path a 1 MiB scratch file is generated.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};

use freestyle::{
    decrypt_stream, encrypt_stream, CipherParameter, Key, KeyMaterial, Nonce, PepperDistribution,
    RandomSource,
};

fn main() -> freestyle::Result<()> {
    let dir = tempfile::tempdir()?;
    let input = match std::env::args_os().nth(1) {
        Some(p) => p.into(),
        None => {
            let p = dir.path().join("plain.bin");
            let mut f = BufWriter::new(File::create(&p)?);
            for i in 0..(1u32 << 20) {
                f.write_all(&[(i * 31 % 251) as u8])?;
            }
            f.flush()?;
            p
        }
    };
    let enc = dir.path().join("cipher.fsty");
    let dec = dir.path().join("plain.out");

    let mut rng = RandomSource::system()?;
    let mut nonce = [0u8; 12];
    rng.fill_bytes(&mut nonce)?;
    let key = Key::from_bytes(&[0x11; 32])?;
    let km = KeyMaterial::new(key, Nonce(nonce));
    let cp = CipherParameter::new(8, 32, 2, 2, 16)?;

    let n = encrypt_stream(
        &km,
        &cp,
        &mut rng,
        PepperDistribution::Uniform,
        BufReader::new(File::open(&input)?),
        BufWriter::new(File::create(&enc)?),
    )?;
    let m = decrypt_stream(
        &key,
        BufReader::new(File::open(&enc)?),
        BufWriter::new(File::create(&dec)?),
    )?;

    let enc_len = std::fs::metadata(&enc)?.len();
    println!("plaintext  {n} bytes");
    println!(
        "frame      {enc_len} bytes ({:.3}% larger)",
        (enc_len - n) as f64 * 100.0 / n.max(1) as f64
    );
    println!(
        "decrypted  {m} bytes, identical: {}",
        std::fs::read(&input)? == std::fs::read(&dec)?
    );
    Ok(())
}
