//! Dense affine layer.

use rand::Rng;

use crate::error::{Error, Result};
use crate::numeric::Matrix;

/// A dense layer computing `z = x · Wᵀ (+ b)`.
///
/// `weight` is `out_features × in_features`, row-major. The bias, when
/// present, is a `1 × out_features` row added to every sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    pub weight: Matrix,
    pub bias: Option<Matrix>,
}

impl DenseLayer {
    /// Weights drawn uniform from `(-b, b)` with `b = 2/√in_features`;
    /// bias starts at zero.
    pub fn init<R: Rng + ?Sized>(
        in_features: usize,
        out_features: usize,
        use_bias: bool,
        rng: &mut R,
    ) -> Self {
        let bound = 2.0 / (in_features as f64).sqrt();
        DenseLayer {
            weight: Matrix::uniform(out_features, in_features, -bound, bound, rng),
            bias: if use_bias {
                Some(Matrix::zeros(1, out_features))
            } else {
                None
            },
        }
    }

    pub fn from_parts(weight: Matrix, bias: Option<Matrix>) -> Result<Self> {
        if let Some(b) = &bias {
            if b.rows() != 1 || b.cols() != weight.rows() {
                return Err(Error::Shape(format!(
                    "bias {}x{} for weight {}x{}",
                    b.rows(),
                    b.cols(),
                    weight.rows(),
                    weight.cols()
                )));
            }
        }
        Ok(DenseLayer { weight, bias })
    }

    pub fn in_features(&self) -> usize {
        self.weight.cols()
    }

    pub fn out_features(&self) -> usize {
        self.weight.rows()
    }

    pub fn use_bias(&self) -> bool {
        self.bias.is_some()
    }

    /// `x` is `batch × in_features`; the result is `batch × out_features`.
    pub fn forward(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.in_features() {
            return Err(Error::Shape(format!(
                "dense forward: input has {} features, layer expects {}",
                x.cols(),
                self.in_features()
            )));
        }
        let z = x.matmul_transpose(&self.weight)?;
        match &self.bias {
            Some(b) => z.add_row_broadcast(b),
            None => Ok(z),
        }
    }
}
