use std::collections::BTreeMap;

use super::{ClassExplanation, ExplanationReport, ExtractError, Thresholds, SIMPLIFY_LIMIT};
use crate::data::Dataset;
use crate::logic::{complexity, format, simplify_within, ConceptId, Formula, Literal, Minterm};
use crate::metrics::test_explanation;
use crate::nn::{EntropyModel, NnError};

fn check_class(model: &EntropyModel, class: usize) -> Result<(), ExtractError> {
    if class >= model.n_classes() {
        return Err(ExtractError::ClassOutOfRange {
            class,
            n_classes: model.n_classes(),
        });
    }
    Ok(())
}

/// Concepts ranked by normalized attention for `class` (descending, then by index).
pub fn concept_relevance(model: &EntropyModel, class: usize) -> Result<Vec<(ConceptId, f64)>, ExtractError> {
    check_class(model, class)?;
    let att = model.entry.attention();
    let mut ranked: Vec<(ConceptId, f64)> = att
        .alpha_norm
        .row(class)
        .iter()
        .enumerate()
        .map(|(j, &a)| (ConceptId(j), a))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(ranked)
}

fn relevant_mask(model: &EntropyModel, class: usize, threshold: f64) -> Vec<bool> {
    let att = model.entry.attention();
    att.alpha_norm.row(class).iter().map(|&a| a >= threshold).collect()
}

fn minterm_for(row: &[f64], relevant: &[bool], boolean: f64) -> Minterm {
    let lits = row
        .iter()
        .zip(relevant)
        .enumerate()
        .filter(|(_, (_, &keep))| keep)
        .map(|(j, (&v, _))| if v > boolean { Literal::pos(j) } else { Literal::neg(j) });
    Minterm::new(lits).expect("one literal per concept")
}

/// The sample's minterm over the concepts relevant to `class`.
pub fn local_explanation(
    model: &EntropyModel,
    x: &[f64],
    class: usize,
    thresholds: Thresholds,
) -> Result<Minterm, ExtractError> {
    check_class(model, class)?;
    if x.len() != model.n_concepts() {
        return Err(NnError::Dimension(format!(
            "sample has {} concepts, model expects {}",
            x.len(),
            model.n_concepts()
        ))
        .into());
    }
    if let Some(v) = x.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(NnError::Domain(format!("concept value {v} is outside [0, 1]")).into());
    }
    let relevant = relevant_mask(model, class, thresholds.relevance);
    Ok(minterm_for(x, &relevant, thresholds.boolean))
}

/// Class-level formula: local minterms of correctly predicted class members,
/// greedily combined while validation accuracy improves, then minimized.
/// An empty validation set falls back to the training set.
pub fn explain_class(
    model: &EntropyModel,
    train: &Dataset,
    validation: &Dataset,
    class: usize,
    thresholds: Thresholds,
) -> Result<ExplanationReport, ExtractError> {
    check_class(model, class)?;
    let validation = if validation.is_empty() { train } else { validation };
    let preds = model.predict(&train.x)?;
    let relevant = relevant_mask(model, class, thresholds.relevance);

    let mut coverage: BTreeMap<Minterm, usize> = BTreeMap::new();
    let mut seeds = 0;
    for (i, row) in train.x.iter_rows().enumerate() {
        if preds[i] == class && train.y[i] == class {
            seeds += 1;
            *coverage.entry(minterm_for(row, &relevant, thresholds.boolean)).or_default() += 1;
        }
    }
    if seeds == 0 {
        return Err(ExtractError::NoPositives { class });
    }

    let mut candidates: Vec<(Minterm, usize)> =
        coverage.into_iter().filter(|(m, _)| !m.is_empty()).collect();
    candidates.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));

    let val_acc = |terms: &[Minterm]| -> Result<f64, ExtractError> {
        let f = Formula::from_minterms(terms);
        Ok(test_explanation(&f, &validation.x, &validation.y, class, thresholds.boolean)?.0)
    };

    let (formula, support) = if candidates.is_empty() {
        // every seed sample had an empty minterm: no concept is relevant
        (Formula::Const(true), seeds)
    } else {
        let mut chosen: Vec<Minterm> = Vec::new();
        let mut support = 0;
        let mut current = f64::NEG_INFINITY;
        while !candidates.is_empty() {
            let mut best: Option<(usize, f64)> = None;
            for (idx, (m, _)) in candidates.iter().enumerate() {
                let mut trial = chosen.clone();
                trial.push(m.clone());
                let acc = val_acc(&trial)?;
                if best.is_none_or(|(_, b)| acc > b) {
                    best = Some((idx, acc));
                }
            }
            let (idx, acc) = best.expect("candidates is nonempty");
            if !chosen.is_empty() && acc <= current {
                break;
            }
            let (m, cov) = candidates.remove(idx);
            chosen.push(m);
            support += cov;
            current = acc;
        }
        let greedy = Formula::from_minterms(&chosen);
        let formula = if greedy.concepts().len() <= SIMPLIFY_LIMIT {
            simplify_within(&greedy, SIMPLIFY_LIMIT)?
        } else {
            greedy
        };
        (formula, support)
    };

    report(formula, support, train, validation, class, thresholds, &relevant)
}

fn report(
    formula: Formula,
    support: usize,
    train: &Dataset,
    validation: &Dataset,
    class: usize,
    thresholds: Thresholds,
    relevant: &[bool],
) -> Result<ExplanationReport, ExtractError> {
    let (train_accuracy, _) = test_explanation(&formula, &train.x, &train.y, class, thresholds.boolean)?;
    let (validation_accuracy, _) =
        test_explanation(&formula, &validation.x, &validation.y, class, thresholds.boolean)?;
    Ok(ExplanationReport {
        class,
        class_name: train.class_names.get(class).cloned().unwrap_or_else(|| class.to_string()),
        formula_text: format(&formula, &train.concept_names),
        complexity: complexity(&formula)?,
        formula,
        train_accuracy,
        validation_accuracy,
        support,
        relevant_concepts: relevant
            .iter()
            .enumerate()
            .filter(|(_, &r)| r)
            .map(|(j, _)| train.concept_names[j].clone())
            .collect(),
    })
}

/// [`explain_class`] for every class; failures are recorded, not raised.
pub fn explain_all(
    model: &EntropyModel,
    train: &Dataset,
    validation: &Dataset,
    thresholds: Thresholds,
) -> Vec<ClassExplanation> {
    (0..model.n_classes())
        .map(|class| match explain_class(model, train, validation, class, thresholds) {
            Ok(r) => ClassExplanation::Explained(r),
            Err(e) => ClassExplanation::Failed {
                class,
                class_name: train.class_names.get(class).cloned().unwrap_or_else(|| class.to_string()),
                error: e.to_string(),
            },
        })
        .collect()
}
