//! Signed fixed-point codec over `Z_n`.
//!
//! `encode(x, s)` maps a real to `round(x · 2^s) mod n`, with negatives in
//! the upper half of the ring (centered lift at `n/2`). Encoding goes
//! through the exact mantissa/exponent decomposition of the `f64`, so a
//! scale of 1074 bits or more loses nothing at all — that is what the mock
//! backend relies on.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numeric::Matrix;

use super::RingMatrix;

/// Codec tied to a ring modulus and a base fraction-bit count `F`.
///
/// Weights encode at scale `F`; ciphertext-by-plaintext products live at the
/// product scale `2F`.
#[derive(Debug, Clone)]
pub struct FixedPointCodec {
    fraction_bits: u32,
    modulus: BigUint,
    half: BigUint,
}

impl FixedPointCodec {
    pub fn new(fraction_bits: u32, modulus: BigUint) -> Self {
        let half = &modulus >> 1;
        FixedPointCodec {
            fraction_bits,
            modulus,
            half,
        }
    }

    pub fn fraction_bits(&self) -> u32 {
        self.fraction_bits
    }

    /// The product scale `2F`.
    pub fn product_scale(&self) -> u32 {
        2 * self.fraction_bits
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    /// Encodes one real at the given scale.
    pub fn encode(&self, x: f64, scale_exp: u32) -> Result<BigUint> {
        if !x.is_finite() {
            return Err(Error::Codec(format!("cannot encode {x}")));
        }
        if x == 0.0 {
            return Ok(BigUint::zero());
        }
        let (mantissa, exp2, negative) = decompose(x);
        let shift = exp2 + scale_exp as i64;
        let magnitude = if shift >= 0 {
            BigUint::from(mantissa) << shift as u64
        } else {
            let t = (-shift) as u64;
            // round half away from zero
            (BigUint::from(mantissa) + (BigUint::from(1u8) << (t - 1))) >> t
        };
        if magnitude >= self.half {
            return Err(Error::Codec(format!(
                "magnitude overflow: |{x}| at scale {scale_exp} exceeds n/2"
            )));
        }
        Ok(if negative && !magnitude.is_zero() {
            &self.modulus - magnitude
        } else {
            magnitude
        })
    }

    /// Centered lift: ring elements above `n/2` are negative.
    pub fn lift_is_negative(&self, m: &BigUint) -> bool {
        m > &self.half
    }

    /// Decodes one ring element at the given scale. Values beyond the `f64`
    /// range saturate instead of becoming infinite.
    pub fn decode(&self, m: &BigUint, scale_exp: u32) -> f64 {
        let (negative, magnitude) = if self.lift_is_negative(m) {
            (true, &self.modulus - m)
        } else {
            (false, m.clone())
        };
        if magnitude.is_zero() {
            return 0.0;
        }
        let bits = magnitude.bits();
        let v = if bits <= 53 {
            mul_pow2(magnitude.to_f64().unwrap(), -(scale_exp as i64))
        } else {
            let top = (magnitude >> (bits - 53)).to_f64().unwrap();
            mul_pow2(top, bits as i64 - 53 - scale_exp as i64)
        };
        if negative {
            -v
        } else {
            v
        }
    }

    pub fn encode_matrix(&self, m: &Matrix, scale_exp: u32) -> Result<RingMatrix> {
        let mut entries = Vec::with_capacity(m.rows() * m.cols());
        for v in m.as_slice() {
            entries.push(self.encode(*v, scale_exp)?);
        }
        Ok(RingMatrix::new(m.rows(), m.cols(), scale_exp, entries))
    }

    pub fn decode_matrix(&self, m: &RingMatrix) -> Matrix {
        let data = m
            .entries()
            .iter()
            .map(|e| self.decode(e, m.scale_exp()))
            .collect();
        Matrix::from_vec(m.rows(), m.cols(), data).expect("ring matrix is rectangular")
    }
}

/// Splits a nonzero finite `f64` into `(mantissa, exponent, negative)` with
/// `|x| = mantissa · 2^exponent` exactly.
fn decompose(x: f64) -> (u64, i64, bool) {
    let bits = x.to_bits();
    let negative = bits >> 63 == 1;
    let biased = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    if biased == 0 {
        (frac, -1074, negative)
    } else {
        (frac | (1u64 << 52), biased - 1075, negative)
    }
}

/// `x · 2^e` for exponents far outside the representable range, saturating
/// at `f64::MAX` and flushing to zero on underflow.
fn mul_pow2(mut x: f64, mut e: i64) -> f64 {
    while e > 0 {
        let step = e.min(1000);
        x *= 2f64.powi(step as i32);
        if !x.is_finite() {
            return f64::MAX;
        }
        e -= step;
    }
    while e < 0 {
        let step = (-e).min(1000);
        x /= 2f64.powi(step as i32);
        if x == 0.0 {
            return 0.0;
        }
        e += step;
    }
    x
}
