//! Encrypt and decrypt a short message in memory, then show that a second
//! encryption of the same plaintext under the same key and nonce differs.

use freestyle::{
    decrypt_frame, encrypt_message, CipherParameter, Key, KeyMaterial, Nonce, RandomSource,
};

fn main() -> freestyle::Result<()> {
    let key = Key::from_bytes(&[0x5a; 32])?;
    let km = KeyMaterial::new(key, Nonce(*b"unique nonce"));
    let cp = CipherParameter::new(8, 32, 2, 2, 12)?;
    let mut rng = RandomSource::system()?;

    let plaintext = b"Freestyle picks a fresh round count for every block.";
    let first = encrypt_message(&km, &cp, plaintext, &mut rng)?.to_bytes();
    let second = encrypt_message(&km, &cp, plaintext, &mut rng)?.to_bytes();

    println!(
        "frame length   {} bytes for {} plaintext bytes",
        first.len(),
        plaintext.len()
    );
    println!("first  body    {}", hex::encode(&first[81..]));
    println!("second body    {}", hex::encode(&second[81..]));
    println!("ciphertexts differ: {}", first != second);

    let recovered = decrypt_frame(&key, &first)?;
    assert_eq!(recovered, plaintext);
    println!("recovered      {}", String::from_utf8_lossy(&recovered));
    Ok(())
}
