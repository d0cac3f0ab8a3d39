use super::{ClassExplanation, ExplanationReport, ExtractError, Thresholds};
use crate::data::Dataset;
use crate::logic::{complexity, format, quine_mccluskey, simplify, Formula, MAX_VARIABLES};
use crate::metrics::test_explanation;
use crate::nn::{sigmoid, PsiNetwork};

/// Largest per-neuron fan-in whose truth table gets enumerated.
pub const PSI_MAX_FAN_IN: usize = 12;

/// One formula per output neuron.
///
/// Each neuron's truth table over its retained inputs (read as 0/1, output
/// thresholded at 0.5) is minimized, then the input formulas of the previous
/// layer are substituted in.
pub fn psi_explain(network: &PsiNetwork) -> Result<Vec<Formula>, ExtractError> {
    let mut inputs: Vec<Formula> = (0..network.n_concepts()).map(Formula::var).collect();
    for (l, layer) in network.layers.iter().enumerate() {
        let mut next = Vec::with_capacity(layer.outputs());
        for o in 0..layer.outputs() {
            let retained = network.retained_inputs(l, o);
            let m = retained.len();
            if m > PSI_MAX_FAN_IN {
                return Err(ExtractError::FanInCapacity {
                    layer: l,
                    neuron: o,
                    fan_in: m,
                    limit: PSI_MAX_FAN_IN,
                });
            }
            let row = layer.weights.row(o);
            let on: Vec<u32> = (0..1u32 << m)
                .filter(|bits| {
                    let mut z = layer.bias[o];
                    for (t, &j) in retained.iter().enumerate() {
                        if bits >> t & 1 == 1 {
                            z += row[j];
                        }
                    }
                    sigmoid(z) > 0.5
                })
                .collect();
            let local = quine_mccluskey(&on, &[], m)?;
            let composed = local.substitute(&|c| inputs[retained[c.0]].clone());
            let composed = if composed.concepts().len() <= MAX_VARIABLES {
                simplify(&composed)?
            } else {
                composed.canonical()
            };
            next.push(composed);
        }
        inputs = next;
    }
    Ok(inputs)
}

/// Report for one output neuron of a ψ network. Support counts training
/// samples of `class` that satisfy the formula.
pub fn psi_explain_class(
    network: &PsiNetwork,
    formulas: &[Formula],
    train: &Dataset,
    validation: &Dataset,
    class: usize,
    thresholds: Thresholds,
) -> Result<ExplanationReport, ExtractError> {
    if class >= network.n_classes() || class >= formulas.len() {
        return Err(ExtractError::ClassOutOfRange {
            class,
            n_classes: network.n_classes(),
        });
    }
    let validation = if validation.is_empty() { train } else { validation };
    let formula = formulas[class].clone();
    let (train_accuracy, preds) = test_explanation(&formula, &train.x, &train.y, class, thresholds.boolean)?;
    let (validation_accuracy, _) =
        test_explanation(&formula, &validation.x, &validation.y, class, thresholds.boolean)?;
    let support = preds.iter().zip(&train.y).filter(|(&p, &y)| p && y == class).count();
    Ok(ExplanationReport {
        class,
        class_name: train.class_names.get(class).cloned().unwrap_or_else(|| class.to_string()),
        formula_text: format(&formula, &train.concept_names),
        complexity: complexity(&formula)?,
        relevant_concepts: formula.concepts().iter().map(|c| train.concept_names[c.0].clone()).collect(),
        formula,
        train_accuracy,
        validation_accuracy,
        support,
    })
}

/// Reports for every output neuron; a failed extraction marks every class.
pub fn psi_explain_all(
    network: &PsiNetwork,
    train: &Dataset,
    validation: &Dataset,
    thresholds: Thresholds,
) -> Vec<ClassExplanation> {
    let name = |c: usize| train.class_names.get(c).cloned().unwrap_or_else(|| c.to_string());
    let formulas = match psi_explain(network) {
        Ok(f) => f,
        Err(e) => {
            return (0..network.n_classes())
                .map(|class| ClassExplanation::Failed {
                    class,
                    class_name: name(class),
                    error: e.to_string(),
                })
                .collect()
        }
    };
    (0..network.n_classes())
        .map(|class| match psi_explain_class(network, &formulas, train, validation, class, thresholds) {
            Ok(r) => ClassExplanation::Explained(r),
            Err(e) => ClassExplanation::Failed {
                class,
                class_name: name(class),
                error: e.to_string(),
            },
        })
        .collect()
}
