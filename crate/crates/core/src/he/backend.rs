//! Backend switch between real Paillier and plaintext mock arithmetic.
//!
//! Both backends expose the same three operations the protocol needs —
//! encrypt a ring matrix, subtract a plaintext ring matrix from an
//! encrypted one, and the encrypted-weight-by-plaintext-batch product —
//! under an identical message flow. The mock backend stores the ring
//! elements themselves where ciphertext values would go.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::RngCore;

use crate::error::{Error, Result};
use crate::numeric::Matrix;

use super::{Ciphertext, FixedPointCodec, PublicKey, RingMatrix, SecretKey};

/// Which arithmetic sits behind the protocol's encrypted values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeMode {
    Paillier,
    Mock,
}

impl std::fmt::Display for HeMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HeMode::Paillier => write!(f, "paillier"),
            HeMode::Mock => write!(f, "mock"),
        }
    }
}

/// Fraction bits used by the mock ring. Any finite `f64` has its lowest
/// set bit at 2^-1074 or above, so this scale encodes doubles exactly.
pub const MOCK_FRACTION_BITS: u32 = 1080;

/// Mock ring modulus width: holds product-scale (2·1080 bits) values with
/// headroom for sums.
pub const MOCK_MODULUS_BITS: u64 = 2400;

/// Shared public context: modulus, codec, and (for Paillier) the public key.
#[derive(Debug, Clone)]
pub struct HeContext {
    mode: HeMode,
    codec: FixedPointCodec,
    public_key: Option<PublicKey>,
}

/// An encrypted matrix: Paillier ciphertext values in `Z_{n²}`, or the bare
/// ring elements in mock mode. All entries share one fixed-point scale.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CtMatrix {
    rows: usize,
    cols: usize,
    scale_exp: u32,
    entries: Vec<BigUint>,
}

impl CtMatrix {
    pub fn new(rows: usize, cols: usize, scale_exp: u32, entries: Vec<BigUint>) -> Self {
        assert_eq!(entries.len(), rows * cols, "ciphertext matrix entry count");
        CtMatrix {
            rows,
            cols,
            scale_exp,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn scale_exp(&self) -> u32 {
        self.scale_exp
    }

    pub fn entries(&self) -> &[BigUint] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> Ciphertext {
        Ciphertext {
            value: self.entries[r * self.cols + c].clone(),
            scale_exp: self.scale_exp,
        }
    }
}

impl HeContext {
    /// Paillier context over the given public key.
    pub fn paillier(public_key: PublicKey, fraction_bits: u32) -> Self {
        let codec = FixedPointCodec::new(fraction_bits, public_key.modulus().clone());
        HeContext {
            mode: HeMode::Paillier,
            codec,
            public_key: Some(public_key),
        }
    }

    /// Mock context over a power-of-two ring wide enough for exact `f64`
    /// encoding.
    pub fn mock() -> Self {
        let modulus = BigUint::one() << MOCK_MODULUS_BITS;
        HeContext {
            mode: HeMode::Mock,
            codec: FixedPointCodec::new(MOCK_FRACTION_BITS, modulus),
            public_key: None,
        }
    }

    pub fn mode(&self) -> HeMode {
        self.mode
    }

    pub fn codec(&self) -> &FixedPointCodec {
        &self.codec
    }

    pub fn modulus(&self) -> &BigUint {
        self.codec.modulus()
    }

    pub fn public_key(&self) -> Option<&PublicKey> {
        self.public_key.as_ref()
    }

    /// Byte width of one serialized ring element (sized to the modulus).
    pub fn ring_width(&self) -> usize {
        ((self.modulus().bits() + 7) / 8) as usize
    }

    /// Encrypts every entry of a ring matrix. In mock mode this is the
    /// identity on the values.
    pub fn encrypt_matrix<R: RngCore>(&self, m: &RingMatrix, rng: &mut R) -> Result<CtMatrix> {
        match self.mode {
            HeMode::Mock => Ok(CtMatrix::new(
                m.rows(),
                m.cols(),
                m.scale_exp(),
                m.entries().to_vec(),
            )),
            HeMode::Paillier => {
                let pk = self.require_pk()?;
                let mut entries = Vec::with_capacity(m.rows() * m.cols());
                for e in m.entries() {
                    entries.push(pk.encrypt(e, m.scale_exp(), rng)?.value);
                }
                Ok(CtMatrix::new(m.rows(), m.cols(), m.scale_exp(), entries))
            }
        }
    }

    /// Decrypts every entry. Paillier mode needs the secret key.
    pub fn decrypt_matrix(&self, m: &CtMatrix, secret: Option<&SecretKey>) -> Result<RingMatrix> {
        match self.mode {
            HeMode::Mock => Ok(RingMatrix::new(
                m.rows,
                m.cols,
                m.scale_exp,
                m.entries.clone(),
            )),
            HeMode::Paillier => {
                let sk = secret
                    .ok_or_else(|| Error::State("decrypt requires the secret key".into()))?;
                let mut entries = Vec::with_capacity(m.entries.len());
                for v in &m.entries {
                    entries.push(sk.decrypt(&Ciphertext {
                        value: v.clone(),
                        scale_exp: m.scale_exp,
                    })?);
                }
                Ok(RingMatrix::new(m.rows, m.cols, m.scale_exp, entries))
            }
        }
    }

    /// Entry-wise homomorphic subtraction of a plaintext ring matrix.
    pub fn sub_plain(&self, ct: &CtMatrix, plain: &RingMatrix) -> Result<CtMatrix> {
        if ct.rows != plain.rows() || ct.cols != plain.cols() {
            return Err(Error::Shape(format!(
                "sub_plain {}x{} vs {}x{}",
                ct.rows,
                ct.cols,
                plain.rows(),
                plain.cols()
            )));
        }
        if ct.scale_exp != plain.scale_exp() {
            return Err(Error::Codec(format!(
                "sub_plain scale {} vs {}",
                ct.scale_exp,
                plain.scale_exp()
            )));
        }
        match self.mode {
            HeMode::Mock => {
                let n = self.modulus();
                let entries = ct
                    .entries
                    .iter()
                    .zip(plain.entries())
                    .map(|(a, b)| ((a + n) - b) % n)
                    .collect();
                Ok(CtMatrix::new(ct.rows, ct.cols, ct.scale_exp, entries))
            }
            HeMode::Paillier => {
                let pk = self.require_pk()?;
                let entries = ct
                    .entries
                    .iter()
                    .zip(plain.entries())
                    .map(|(a, b)| {
                        pk.ct_sub_plain(
                            &Ciphertext {
                                value: a.clone(),
                                scale_exp: ct.scale_exp,
                            },
                            b,
                        )
                        .value
                    })
                    .collect();
                Ok(CtMatrix::new(ct.rows, ct.cols, ct.scale_exp, entries))
            }
        }
    }

    /// Encrypted matrix product `enc(W) · xᵀ`: takes the encrypted weight
    /// block (`out × in`, scale `F`) and a plaintext batch (`batch × in`),
    /// and returns a `batch × out` encrypted matrix at the product scale
    /// `2F`. Entry `(i, j)` decrypts to `Σ_t Ŵ[j,t] · x̂[i,t] mod n`.
    pub fn enc_matmul(&self, enc_weight: &CtMatrix, x: &Matrix) -> Result<CtMatrix> {
        if x.cols() != enc_weight.cols {
            return Err(Error::Shape(format!(
                "enc_matmul: weight is {}x{}, batch has {} features",
                enc_weight.rows,
                enc_weight.cols,
                x.cols()
            )));
        }
        let f = self.codec.fraction_bits();
        if enc_weight.scale_exp != f {
            return Err(Error::Codec(format!(
                "enc_matmul expects weight at scale {f}, got {}",
                enc_weight.scale_exp
            )));
        }
        let x_ring = self.codec.encode_matrix(x, f)?;
        let out_scale = 2 * f;
        let mut entries = Vec::with_capacity(x.rows() * enc_weight.rows);
        match self.mode {
            HeMode::Mock => {
                let n = self.modulus();
                for i in 0..x.rows() {
                    for j in 0..enc_weight.rows {
                        let mut acc = BigUint::zero();
                        for t in 0..enc_weight.cols {
                            acc += &enc_weight.entries[j * enc_weight.cols + t]
                                * x_ring.get(i, t);
                        }
                        entries.push(acc % n);
                    }
                }
            }
            HeMode::Paillier => {
                let pk = self.require_pk()?;
                for i in 0..x.rows() {
                    for j in 0..enc_weight.rows {
                        // multiplicative identity in Z_{n²} = encryption of 0
                        let mut acc = Ciphertext {
                            value: BigUint::one(),
                            scale_exp: out_scale,
                        };
                        for t in 0..enc_weight.cols {
                            let k = x_ring.get(i, t);
                            if k.is_zero() {
                                continue;
                            }
                            let term = pk.ct_mul_plain(&enc_weight.get(j, t), k, f)?;
                            acc = pk.ct_add(&acc, &term)?;
                        }
                        entries.push(acc.value);
                    }
                }
            }
        }
        Ok(CtMatrix::new(x.rows(), enc_weight.rows, out_scale, entries))
    }

    fn require_pk(&self) -> Result<&PublicKey> {
        self.public_key
            .as_ref()
            .ok_or_else(|| Error::State("paillier context without public key".into()))
    }
}
