use thiserror::Error;

/// Errors produced by the cipher, its framing and the analysis helpers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid cipher parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid key length {0}: expected 16 or 32 bytes")]
    InvalidKeyLength(usize),

    /// No pepper offset reproduced all 28 bootstrap hashes.
    #[error("wrong key: no pepper offset in [0, {offsets}) reproduces the bootstrap hashes")]
    WrongKey { offsets: u64 },

    /// A message block ran to `r_max` rounds without meeting its halting hash.
    #[error("block {index} never reached its halting hash")]
    BlockHalt { index: u64 },

    #[error("malformed frame: {0}")]
    MalformedFrame(String),

    #[error("entropy source failure: {0}")]
    Entropy(String),

    #[error("block counter exhausted (more than 2^32 blocks under one bootstrap)")]
    CounterOverflow,

    #[error("argument outside the domain of the formula: {0}")]
    Domain(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
