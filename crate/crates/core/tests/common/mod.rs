//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use lenkit::data::{load_csv, Dataset};
use lenkit::extraction::{explain_class, Thresholds};
use lenkit::logic::{format, ConceptId, Formula};
use lenkit::nn::{train, EntropyArch, EntropyModel, Matrix, Parameterized, TrainConfig};
use rand::Rng;

pub fn xor_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/xor.csv")
}

pub fn xor_data() -> Dataset {
    load_csv(xor_path(), "label").expect("xor fixture loads")
}

/// Direct tree walk, written separately from the library evaluator.
pub fn oracle_eval(f: &Formula, row: &[bool]) -> bool {
    match f {
        Formula::Const(b) => *b,
        Formula::Var(ConceptId(i)) => row[*i],
        Formula::Not(g) => !oracle_eval(g, row),
        Formula::And(gs) => {
            let mut v = true;
            for g in gs {
                v = v && oracle_eval(g, row);
            }
            v
        }
        Formula::Or(gs) => {
            let mut v = false;
            for g in gs {
                v = v || oracle_eval(g, row);
            }
            v
        }
    }
}

pub fn bits(v: u32, k: usize) -> Vec<bool> {
    (0..k).map(|i| (v >> i) & 1 == 1).collect()
}

/// Hits counted row by row: a concept is true when strictly above `threshold`.
pub fn oracle_accuracy(f: &Formula, rows: &[Vec<f64>], y: &[usize], class: usize, threshold: f64) -> f64 {
    let mut hits = 0;
    for (row, &label) in rows.iter().zip(y) {
        let b: Vec<bool> = row.iter().map(|&v| v > threshold).collect();
        if oracle_eval(f, &b) == (label == class) {
            hits += 1;
        }
    }
    hits as f64 / y.len() as f64
}

/// XOR over two variables, by truth table.
pub fn is_xor(f: &Formula) -> bool {
    (0..4u32).all(|v| {
        let r = bits(v, 2);
        oracle_eval(f, &r) == (r[0] != r[1])
    })
}

pub fn random_formula<R: Rng>(rng: &mut R, k: usize, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..10) {
            0 => Formula::Const(rng.gen()),
            1..=3 => Formula::Not(Box::new(Formula::Var(ConceptId(rng.gen_range(0..k))))),
            _ => Formula::Var(ConceptId(rng.gen_range(0..k))),
        };
    }
    let n = rng.gen_range(2..=3);
    let children = (0..n).map(|_| random_formula(rng, k, depth - 1)).collect();
    match rng.gen_range(0..5) {
        0 => Formula::Not(Box::new(random_formula(rng, k, depth - 1))),
        1 | 2 => Formula::And(children),
        _ => Formula::Or(children),
    }
}

pub fn random_unit_rows<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..k).map(|_| rng.gen::<f64>()).collect()).collect()
}

/// Largest relative error between `analytic` and central differences of `loss`
/// around `params`. The denominator is floored so that components that are
/// zero on both sides compare by absolute error.
pub fn max_relative_error(params: &[f64], analytic: &[f64], loss: impl Fn(&[f64]) -> f64, step: f64) -> f64 {
    let mut worst: f64 = 0.0;
    let mut p = params.to_vec();
    for i in 0..p.len() {
        let orig = p[i];
        p[i] = orig + step;
        let up = loss(&p);
        p[i] = orig - step;
        let down = loss(&p);
        p[i] = orig;
        let numeric = (up - down) / (2.0 * step);
        let denom = analytic[i].abs().max(numeric.abs()).max(1e-6);
        worst = worst.max((analytic[i] - numeric).abs() / denom);
    }
    worst
}

/// Small entropy model with every parameter (attention logits included) drawn
/// at random, plus a batch, labels and entropy weight.
pub fn random_entropy_case<R: Rng>(rng: &mut R, seed: u64) -> (EntropyModel, Matrix, Vec<usize>, f64) {
    let k = rng.gen_range(1..=4);
    let c = rng.gen_range(1..=3);
    let depth = rng.gen_range(1..=2);
    let hidden: Vec<usize> = (0..depth).map(|_| rng.gen_range(1..=6)).collect();
    let arch = EntropyArch {
        hidden,
        ..EntropyArch::default()
    };
    let mut model = EntropyModel::new(k, c, &arch, seed).unwrap();
    let params: Vec<f64> = (0..model.num_params()).map(|_| rng.gen_range(-1.5..1.5)).collect();
    model.set_params(&params);
    let n = rng.gen_range(1..=8);
    let rows = random_unit_rows(rng, n, k);
    let x = Matrix::from_vec(n, k, rows.concat()).unwrap();
    let y = (0..n).map(|_| rng.gen_range(0..c)).collect();
    let lambda = rng.gen_range(0.0..1.0);
    (model, x, y, lambda)
}

pub struct XorRun {
    pub all_correct: bool,
    pub history: Vec<f64>,
    pub formula: Option<Formula>,
    pub formula_text: String,
}

/// Trains the default entropy model on XOR and explains class 1.
pub fn xor_run(seed: u64) -> XorRun {
    let data = xor_data();
    let cfg = TrainConfig {
        seed,
        ..TrainConfig::default()
    };
    let mut model = EntropyModel::new(2, 2, &EntropyArch::default(), seed).unwrap();
    let history = train(&mut model, &data.x, &data.y, &cfg).unwrap();
    let all_correct = model.predict(&data.x).unwrap() == data.y;
    let empty = data.subset(&[]);
    match explain_class(&model, &data, &empty, 1, Thresholds::default()) {
        Ok(r) => XorRun {
            all_correct,
            history,
            formula_text: format(&r.formula, &data.concept_names),
            formula: Some(r.formula),
        },
        Err(e) => XorRun {
            all_correct,
            history,
            formula: None,
            formula_text: format!("<{e}>"),
        },
    }
}
