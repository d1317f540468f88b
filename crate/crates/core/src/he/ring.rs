//! Plaintext ring-element matrices (masks and masked activations).

use num_bigint::{BigUint, RandBigInt};
use num_traits::Zero;
use rand::RngCore;

use crate::error::{Error, Result};

/// A `rows × cols` matrix of elements of `Z_n` at a common fixed-point
/// scale. The modulus is supplied per operation; matrices only carry the
/// values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingMatrix {
    rows: usize,
    cols: usize,
    scale_exp: u32,
    entries: Vec<BigUint>,
}

impl RingMatrix {
    pub fn new(rows: usize, cols: usize, scale_exp: u32, entries: Vec<BigUint>) -> Self {
        assert_eq!(entries.len(), rows * cols, "ring matrix entry count");
        RingMatrix {
            rows,
            cols,
            scale_exp,
            entries,
        }
    }

    pub fn zeros(rows: usize, cols: usize, scale_exp: u32) -> Self {
        RingMatrix::new(rows, cols, scale_exp, vec![BigUint::zero(); rows * cols])
    }

    /// Entries drawn uniformly from `Z_n`.
    pub fn uniform<R: RngCore>(
        rows: usize,
        cols: usize,
        scale_exp: u32,
        modulus: &BigUint,
        rng: &mut R,
    ) -> Self {
        let entries = (0..rows * cols)
            .map(|_| rng.gen_biguint_below(modulus))
            .collect();
        RingMatrix::new(rows, cols, scale_exp, entries)
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

    pub fn get(&self, r: usize, c: usize) -> &BigUint {
        &self.entries[r * self.cols + c]
    }

    fn check_like(&self, other: &RingMatrix, op: &str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "{op}: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.scale_exp != other.scale_exp {
            return Err(Error::Codec(format!(
                "{op}: scale {} vs {}",
                self.scale_exp, other.scale_exp
            )));
        }
        Ok(())
    }

    /// Entry-wise `(a + b) mod n`.
    pub fn add_mod(&self, other: &RingMatrix, modulus: &BigUint) -> Result<RingMatrix> {
        self.check_like(other, "ring add")?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a + b) % modulus)
            .collect();
        Ok(RingMatrix::new(self.rows, self.cols, self.scale_exp, entries))
    }

    /// Entry-wise `(a − b) mod n`.
    pub fn sub_mod(&self, other: &RingMatrix, modulus: &BigUint) -> Result<RingMatrix> {
        self.check_like(other, "ring sub")?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| ((a + modulus) - (b % modulus)) % modulus)
            .collect();
        Ok(RingMatrix::new(self.rows, self.cols, self.scale_exp, entries))
    }

    /// Plaintext fixed-point matrix product `self · otherᵀ` in the ring:
    /// entry `(i, j) = Σ_t self[i,t] · other[j,t] mod n`, at the summed
    /// scale. This is the reference for what the encrypted product must
    /// decrypt to.
    pub fn matmul_transpose_mod(&self, other: &RingMatrix, modulus: &BigUint) -> Result<RingMatrix> {
        if self.cols != other.cols {
            return Err(Error::Shape(format!(
                "ring matmul_transpose {}x{} by ({}x{})ᵀ",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let scale = self.scale_exp + other.scale_exp;
        let mut entries = Vec::with_capacity(self.rows * other.rows);
        for i in 0..self.rows {
            for j in 0..other.rows {
                let mut acc = BigUint::zero();
                for t in 0..self.cols {
                    acc += self.get(i, t) * other.get(j, t);
                }
                entries.push(acc % modulus);
            }
        }
        Ok(RingMatrix::new(self.rows, other.rows, scale, entries))
    }
}
