//! Small deterministic training engine: dense layers, the entropy-based
//! concept layer, ψ networks, losses and AdamW.

mod adamw;
mod dense;
pub mod entropy;
mod loss;
mod matrix;
mod model;
pub mod psi;
mod train;

pub use adamw::{adamw_step, AdamState, TrainConfig};
pub use dense::{DenseGrads, DenseLayer};
pub use entropy::{Attention, EntropyGrads, EntropyLinearLayer};
pub use loss::{binary_cross_entropy_with_logits, cross_entropy_loss, leaky_relu, sigmoid, softmax_rows};
pub use matrix::Matrix;
pub use model::{EntropyArch, EntropyModel, LossBreakdown, TrunkLayer, DEFAULT_SLOPE};
pub use psi::{psi_train_prune, train_psi, PsiNetwork, DEFAULT_FAN_IN};
pub use train::train;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NnError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("training diverged at epoch {epoch}: {detail}")]
    Diverged { epoch: usize, detail: String },
}

/// Flat view over every trainable scalar of a model, in a fixed order that
/// gradients and optimizer state share.
pub trait Parameterized {
    fn num_params(&self) -> usize;
    fn params(&self) -> Vec<f64>;
    fn set_params(&mut self, params: &[f64]);
}

/// Sum of `−α ln α` over every attention row of the model's entropy layer.
pub fn entropy_logic_loss(model: &EntropyModel) -> f64 {
    model.entry.entropy()
}

/// Softmax attention and max-normalized mask of an entropy layer.
pub fn entropy_attention(layer: &EntropyLinearLayer) -> (Matrix, Matrix) {
    let att = layer.attention();
    (att.alpha, att.alpha_norm)
}
