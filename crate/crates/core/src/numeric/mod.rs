//! Minimal dense neural-network kernel.
//!
//! Everything here operates on row-major [`Matrix`] values with samples as
//! rows, so an affine layer computes `z = x · Wᵀ + b`. The kernel is just
//! large enough for the protocol lab: dense layers, ReLU/sigmoid/identity
//! activations, softmax cross-entropy and MSE losses, reverse-mode gradients
//! for the fixed MLP structure, and plain SGD.

mod layer;
mod loss;
mod matrix;
mod mlp;

pub use layer::DenseLayer;
pub use loss::{accuracy, mse, softmax_cross_entropy};
pub use matrix::Matrix;
pub use mlp::{Activation, ForwardCache, Mlp, MlpGrads};
