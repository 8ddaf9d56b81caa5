//! Freestyle: a randomized, variable-round ARX stream cipher.
//!
//! Each 64-byte block runs a random number of ChaCha rounds. The sender
//! sends a 16-bit hash of the state at the chosen round; the receiver
//! advances round by round until its own hash matches. A per-message
//! bootstrap with a secret pepper makes every wrong key pay for a scan over
//! all `2^i_c` pepper offsets, while the genuine receiver stops early.
//!
//! ```
//! use freestyle::{decrypt_message, encrypt_message, CipherParameter, Key, KeyMaterial, Nonce, RandomSource};
//!
//! let key = Key::from_bytes(&[7u8; 32]).unwrap();
//! let km = KeyMaterial::new(key, Nonce([1; 12]));
//! let cp = CipherParameter::new(8, 32, 2, 2, 8).unwrap();
//! let mut rng = RandomSource::seeded(42);
//! let msg = encrypt_message(&km, &cp, b"attack at dawn", &mut rng).unwrap();
//! assert_eq!(decrypt_message(&key, &msg).unwrap(), b"attack at dawn");
//! ```
//!
//! Ciphertexts are not authenticated. Use a MAC alongside.

pub mod analysis;
pub mod cli;
pub mod entropy;
pub mod error;
pub mod hash;
pub mod init;
pub mod state;
pub mod stream;

pub use entropy::{PepperDistribution, RandomSource};
pub use error::{Error, Result};
pub use hash::{compute_hash, CollisionTable, HaltTag};
pub use init::{init_receiver, init_sender, InitHashes, Pepper, RoundVector, Work};
pub use state::{
    CipherParameter, CipherState, Key, KeyMaterial, Nonce, RandomWords, RoundSchedule,
};
pub use stream::frame::{EncryptedBlock, EncryptedMessage, FrameHeader};
pub use stream::{
    decrypt_frame, decrypt_message, decrypt_stream, encrypt_message, encrypt_message_with,
    encrypt_stream, Role, Session,
};
