//! Turning trained models into logic formulas.

mod entropy;
mod psi;

pub use entropy::{concept_relevance, explain_all, explain_class, local_explanation};
pub use psi::{psi_explain, psi_explain_all, psi_explain_class, PSI_MAX_FAN_IN};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logic::{Formula, LogicError};
use crate::metrics::MetricError;
use crate::nn::NnError;

/// Largest number of concepts handed to the minimizer after greedy selection.
pub const SIMPLIFY_LIMIT: usize = 12;

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("class {class} is out of range for a model with {n_classes} classes")]
    ClassOutOfRange { class: usize, n_classes: usize },
    #[error("no training sample of class {class} is predicted correctly; nothing to explain")]
    NoPositives { class: usize },
    #[error("neuron {neuron} of layer {layer} has {fan_in} inputs, above the limit of {limit}")]
    FanInCapacity {
        layer: usize,
        neuron: usize,
        fan_in: usize,
        limit: usize,
    },
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Cut-offs used when reading concepts as predicates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    /// Minimum normalized attention for a concept to appear in a class's rules.
    pub relevance: f64,
    /// Activations strictly above this are read as true.
    pub boolean: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            relevance: 0.5,
            boolean: 0.5,
        }
    }
}

/// Class-level explanation with its quality numbers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExplanationReport {
    pub class: usize,
    pub class_name: String,
    #[serde(skip)]
    pub formula: Formula,
    #[serde(rename = "formula")]
    pub formula_text: String,
    pub train_accuracy: f64,
    pub validation_accuracy: f64,
    pub complexity: usize,
    /// Training samples whose local explanation made it into the formula.
    pub support: usize,
    pub relevant_concepts: Vec<String>,
}

/// Per-class result of a batch extraction.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ClassExplanation {
    Explained(ExplanationReport),
    Failed {
        class: usize,
        class_name: String,
        error: String,
    },
}

impl ClassExplanation {
    pub fn class(&self) -> usize {
        match self {
            ClassExplanation::Explained(r) => r.class,
            ClassExplanation::Failed { class, .. } => *class,
        }
    }

    pub fn report(&self) -> Option<&ExplanationReport> {
        match self {
            ClassExplanation::Explained(r) => Some(r),
            ClassExplanation::Failed { .. } => None,
        }
    }
}
