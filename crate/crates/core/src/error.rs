//! Crate-wide error type.

use thiserror::Error;

/// All fallible operations in this crate return this error.
#[derive(Debug, Error)]
pub enum Error {
    /// Matrix or layer dimensions do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Fixed-point encode/decode failure (overflow, scale mismatch).
    #[error("codec error: {0}")]
    Codec(String),

    /// Malformed ciphertext, key generation failure, or key mismatch.
    #[error("crypto error: {0}")]
    Crypto(String),

    /// A protocol step was invoked out of order or with missing state.
    #[error("protocol state error: {0}")]
    State(String),

    /// Caller-supplied data violates a precondition.
    #[error("invalid input: {0}")]
    Input(String),

    /// An experiment or dataset configuration is inconsistent.
    #[error("invalid config: {0}")]
    Config(String),

    /// A file could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// A transcript audit assertion failed.
    #[error("audit failure: {0}")]
    Audit(String),

    /// Underlying I/O failure.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
