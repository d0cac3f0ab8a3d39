//! Quantitative checks of an explanation: accuracy against labels, fidelity
//! to the model, and stability of the concepts it uses across runs.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{booleanize, DataError};
use crate::logic::{ConceptId, Formula, LogicError};
use crate::nn::Matrix;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error("length mismatch: {0} vs {1}")]
    Length(usize, usize),
    #[error("consistency needs at least two formulas, got {0}")]
    TooFewFormulas(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub accuracy: f64,
    pub fidelity: f64,
    pub consistency: Option<f64>,
    pub complexity: usize,
}

/// Applies `f` to every booleanized row and scores it against the
/// "label is `class`" indicator.
pub fn test_explanation(
    f: &Formula,
    x: &Matrix,
    y: &[usize],
    class: usize,
    threshold: f64,
) -> Result<(f64, Vec<bool>), MetricError> {
    if x.rows() != y.len() {
        return Err(MetricError::Length(x.rows(), y.len()));
    }
    let rows = booleanize(x, threshold)?;
    let preds = rows
        .iter()
        .map(|r| crate::logic::evaluate(f, r))
        .collect::<Result<Vec<bool>, _>>()?;
    let hits = preds.iter().zip(y).filter(|(&p, &l)| p == (l == class)).count();
    let accuracy = if y.is_empty() { 0.0 } else { hits as f64 / y.len() as f64 };
    Ok((accuracy, preds))
}

/// Fraction of positions where the two prediction vectors agree.
pub fn fidelity(formula_preds: &[bool], model_preds: &[bool]) -> Result<f64, MetricError> {
    if formula_preds.len() != model_preds.len() {
        return Err(MetricError::Length(formula_preds.len(), model_preds.len()));
    }
    if formula_preds.is_empty() {
        return Ok(1.0);
    }
    let agree = formula_preds.iter().zip(model_preds).filter(|(a, b)| a == b).count();
    Ok(agree as f64 / formula_preds.len() as f64)
}

/// Mean pairwise Jaccard similarity of the concept sets the formulas mention.
/// Two formulas that mention nothing count as identical.
pub fn consistency(formulas: &[Formula]) -> Result<f64, MetricError> {
    if formulas.len() < 2 {
        return Err(MetricError::TooFewFormulas(formulas.len()));
    }
    let sets: Vec<BTreeSet<ConceptId>> = formulas.iter().map(Formula::concepts).collect();
    let mut total = 0.0;
    let mut pairs = 0usize;
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            let union = sets[i].union(&sets[j]).count();
            let inter = sets[i].intersection(&sets[j]).count();
            total += if union == 0 { 1.0 } else { inter as f64 / union as f64 };
            pairs += 1;
        }
    }
    Ok(total / pairs as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse;

    const XY: [&str; 2] = ["x1", "x2"];

    fn xor_x() -> Matrix {
        Matrix::from_rows(&[[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]).unwrap()
    }

    #[test]
    fn xor_formula_is_perfect_on_xor_rows() {
        let f = parse("x1 & ~x2 | ~x1 & x2", &XY).unwrap();
        let (acc, preds) = test_explanation(&f, &xor_x(), &[0, 1, 1, 0], 1, 0.5).unwrap();
        assert_eq!(acc, 1.0);
        assert_eq!(preds, vec![false, true, true, false]);
    }

    #[test]
    fn constant_true_on_balanced_labels() {
        let (acc, _) = test_explanation(&Formula::Const(true), &xor_x(), &[0, 1, 1, 0], 1, 0.5).unwrap();
        assert_eq!(acc, 0.5);
    }

    #[test]
    fn fidelity_examples() {
        let a = [true, false, true];
        assert_eq!(fidelity(&a, &a).unwrap(), 1.0);
        assert_eq!(fidelity(&a, &[false, true, false]).unwrap(), 0.0);
        assert!(fidelity(&a, &[true]).is_err());
    }

    #[test]
    fn consistency_examples() {
        let f = parse("x1 & x2", &XY).unwrap();
        let g = parse("x1", &XY).unwrap();
        let h = parse("x2", &XY).unwrap();
        assert_eq!(consistency(&[f.clone(), f.clone()]).unwrap(), 1.0);
        assert_eq!(consistency(&[g.clone(), h]).unwrap(), 0.0);
        assert_eq!(consistency(&[f, g]).unwrap(), 0.5);
        assert!(matches!(
            consistency(&[Formula::Const(true)]),
            Err(MetricError::TooFewFormulas(1))
        ));
    }

    #[test]
    fn invalid_activations_rejected() {
        let x = Matrix::from_rows(&[[0.0, 2.0]]).unwrap();
        assert!(test_explanation(&Formula::Const(true), &x, &[0], 0, 0.5).is_err());
    }
}
