//! Additively homomorphic encryption and fixed-point encoding.
//!
//! The cut-layer protocol needs exactly one homomorphic shape: encrypt a
//! weight block once, multiply the ciphertexts by plaintext ring elements,
//! add ciphertexts, and let the key holder decrypt the result. Plain
//! Paillier with `g = n + 1` covers that. Real-valued tensors enter the
//! ring through a signed fixed-point codec with a centered lift for
//! negatives.
//!
//! A mock backend runs the identical message flow on plaintext ring
//! elements over a power-of-two modulus wide enough to encode any `f64`
//! exactly, so equivalence tests see no quantization at all.

mod backend;
mod codec;
mod paillier;
mod ring;

pub use backend::{CtMatrix, HeContext, HeMode, MOCK_FRACTION_BITS, MOCK_MODULUS_BITS};
pub use codec::FixedPointCodec;
pub use paillier::{keygen, Ciphertext, Keypair, PublicKey, SecretKey};
pub use ring::RingMatrix;
