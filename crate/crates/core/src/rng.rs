//! Labeled seed derivation.
//!
//! Every random choice in an experiment flows from a single master seed.
//! Subsystems never share an RNG; each derives its own stream from the
//! master seed and a purpose label, so adding a consumer in one place cannot
//! shift the random values drawn somewhere else.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

/// Derives a 32-byte RNG seed from a master seed and a purpose label.
pub fn derive_seed(master: u64, label: &str) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(master.to_be_bytes());
    hasher.update(label.as_bytes());
    hasher.finalize().into()
}

/// A deterministic RNG for the given master seed and purpose label.
pub fn derive_rng(master: u64, label: &str) -> ChaCha20Rng {
    ChaCha20Rng::from_seed(derive_seed(master, label))
}

/// Collapses a derived seed back to a `u64`, for nesting master seeds.
pub fn derive_subseed(master: u64, label: &str) -> u64 {
    let bytes = derive_seed(master, label);
    u64::from_be_bytes(bytes[..8].try_into().unwrap())
}
