//! Reproducible runs: load, split, train, explain, score, report.
//!
//! The `lenkit` binary is a thin wrapper over the functions here.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{load_csv, split, DataError, Dataset, DEFAULT_LABEL_COLUMN};
use crate::extraction::{explain_all, psi_explain_all, ClassExplanation, Thresholds};
use crate::logic::{format, parse, parse_infer_names, simplify, Formula};
use crate::metrics::{fidelity, test_explanation, MetricRecord};
use crate::nn::{
    psi_train_prune, train, EntropyArch, EntropyModel, NnError, PsiNetwork, TrainConfig, DEFAULT_FAN_IN,
    DEFAULT_SLOPE,
};

pub const VERSION: &str = concat!("lenkit ", env!("CARGO_PKG_VERSION"));

/// Losses kept from the end of each training history.
const LOSS_TAIL: usize = 10;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Training(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Training(_) => 3,
        }
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        match e {
            DataError::Split(_) => CliError::Usage(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<NnError> for CliError {
    fn from(e: NnError) -> Self {
        match e {
            NnError::Diverged { .. } => CliError::Training(e.to_string()),
            NnError::Domain(_) => CliError::Data(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Entropy,
    Psi,
}

/// Everything a `train` run needs. Loaded from JSON; missing fields default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub data: PathBuf,
    pub label_column: String,
    pub model: ModelKind,
    /// Entropy model: entropy-layer width then dense trunk widths.
    /// ψ network: hidden layer widths.
    pub hidden: Vec<usize>,
    pub temperature: f64,
    pub slope: f64,
    pub fan_in: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub entropy_weight: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
    pub thresholds: Thresholds,
    /// Train / validation / test fractions.
    pub split: [f64; 3],
    pub seeds: Vec<u64>,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let t = TrainConfig::default();
        Self {
            data: PathBuf::new(),
            label_column: DEFAULT_LABEL_COLUMN.into(),
            model: ModelKind::Entropy,
            hidden: vec![10, 4],
            temperature: 1.0,
            slope: DEFAULT_SLOPE,
            fan_in: DEFAULT_FAN_IN,
            learning_rate: t.learning_rate,
            epochs: t.epochs,
            entropy_weight: t.entropy_weight,
            beta1: t.beta1,
            beta2: t.beta2,
            eps: t.eps,
            weight_decay: t.weight_decay,
            thresholds: Thresholds::default(),
            split: [0.6, 0.2, 0.2],
            seeds: vec![0],
            out: PathBuf::from("report.json"),
        }
    }
}

impl RunConfig {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self, CliError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))?;
        // a relative dataset path is relative to the config file
        if config.data.is_relative() && !config.data.as_os_str().is_empty() {
            if let Some(dir) = path.parent() {
                config.data = dir.join(&config.data);
            }
        }
        Ok(config)
    }

    pub fn train_config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            entropy_weight: self.entropy_weight,
            seed,
            beta1: self.beta1,
            beta2: self.beta2,
            eps: self.eps,
            weight_decay: self.weight_decay,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.data.as_os_str().is_empty() {
            return Err(CliError::Usage("no dataset given (--data or \"data\" in the config)".into()));
        }
        if self.seeds.is_empty() {
            return Err(CliError::Usage("at least one seed is required".into()));
        }
        if self.model == ModelKind::Entropy && self.hidden.is_empty() {
            return Err(CliError::Usage("the entropy model needs at least one hidden width".into()));
        }
        if self.fan_in == 0 {
            return Err(CliError::Usage("fan-in must be at least 1".into()));
        }
        self.train_config(0).validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitAccuracy {
    pub train: f64,
    pub validation: Option<f64>,
    pub test: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassResult {
    pub explanation: ClassExplanation,
    /// Scored on the held-out split named in [`SeedReport::eval_split`].
    pub metrics: Option<MetricRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedReport {
    pub seed: u64,
    pub epochs_run: usize,
    pub loss_tail: Vec<f64>,
    pub model_accuracy: SplitAccuracy,
    pub eval_split: String,
    pub classes: Vec<ClassResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassConsistency {
    pub class: usize,
    pub class_name: String,
    /// Absent when fewer than two seeds produced a formula for the class.
    pub consistency: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub version: String,
    pub config: RunConfig,
    pub seeds: Vec<SeedReport>,
    pub consistency: Vec<ClassConsistency>,
}

enum Trained {
    Entropy(EntropyModel),
    Psi(PsiNetwork),
}

impl Trained {
    fn predict(&self, x: &crate::nn::Matrix) -> Result<Vec<usize>, NnError> {
        match self {
            Trained::Entropy(m) => m.predict(x),
            Trained::Psi(n) => n.predict(x),
        }
    }
}

fn accuracy(pred: &[usize], y: &[usize]) -> f64 {
    if y.is_empty() {
        return 0.0;
    }
    pred.iter().zip(y).filter(|(a, b)| a == b).count() as f64 / y.len() as f64
}

fn run_seed(config: &RunConfig, data: &Dataset, seed: u64) -> Result<SeedReport, CliError> {
    let parts = split(data.len(), (config.split[0], config.split[1], config.split[2]), seed)?;
    let train_set = data.subset(&parts.train);
    let val_set = data.subset(&parts.validation);
    let test_set = data.subset(&parts.test);
    let tc = config.train_config(seed);

    let (model, history) = match config.model {
        ModelKind::Entropy => {
            let arch = EntropyArch {
                hidden: config.hidden.clone(),
                temperature: config.temperature,
                slope: config.slope,
            };
            let mut m = EntropyModel::new(data.n_concepts(), data.n_classes(), &arch, seed)?;
            let h = train(&mut m, &train_set.x, &train_set.y, &tc)?;
            (Trained::Entropy(m), h)
        }
        ModelKind::Psi => {
            let net = PsiNetwork::new(data.n_concepts(), &config.hidden, data.n_classes(), config.fan_in, seed)?;
            let (net, h) = psi_train_prune(net, &train_set.x, &train_set.y, &tc, config.fan_in)?;
            (Trained::Psi(net), h)
        }
    };

    let split_acc = |d: &Dataset| -> Result<Option<f64>, CliError> {
        if d.is_empty() {
            return Ok(None);
        }
        Ok(Some(accuracy(&model.predict(&d.x)?, &d.y)))
    };
    let model_accuracy = SplitAccuracy {
        train: accuracy(&model.predict(&train_set.x)?, &train_set.y),
        validation: split_acc(&val_set)?,
        test: split_acc(&test_set)?,
    };

    let explanations = match &model {
        Trained::Entropy(m) => explain_all(m, &train_set, &val_set, config.thresholds),
        Trained::Psi(n) => psi_explain_all(n, &train_set, &val_set, config.thresholds),
    };

    let (eval_name, eval_set) = if !test_set.is_empty() {
        ("test", &test_set)
    } else if !val_set.is_empty() {
        ("validation", &val_set)
    } else {
        ("train", &train_set)
    };
    let model_preds = model.predict(&eval_set.x)?;
    let mut classes = Vec::with_capacity(explanations.len());
    for explanation in explanations {
        let metrics = match explanation.report() {
            Some(r) => {
                let (acc, preds) =
                    test_explanation(&r.formula, &eval_set.x, &eval_set.y, r.class, config.thresholds.boolean)
                        .map_err(|e| CliError::Data(e.to_string()))?;
                let model_c: Vec<bool> = model_preds.iter().map(|&p| p == r.class).collect();
                Some(MetricRecord {
                    accuracy: acc,
                    fidelity: fidelity(&preds, &model_c).map_err(|e| CliError::Data(e.to_string()))?,
                    consistency: None,
                    complexity: r.complexity,
                })
            }
            None => None,
        };
        classes.push(ClassResult { explanation, metrics });
    }

    Ok(SeedReport {
        seed,
        epochs_run: history.len(),
        loss_tail: history[history.len().saturating_sub(LOSS_TAIL)..].to_vec(),
        model_accuracy,
        eval_split: eval_name.into(),
        classes,
    })
}

/// Runs every seed and assembles the report. Writes nothing.
pub fn build_report(config: &RunConfig) -> Result<RunReport, CliError> {
    config.validate()?;
    let data = load_csv(&config.data, &config.label_column)?;
    let mut seeds = Vec::with_capacity(config.seeds.len());
    for &seed in &config.seeds {
        log::info!("seed {seed}: training {:?} model", config.model);
        seeds.push(run_seed(config, &data, seed)?);
    }

    let mut per_class: BTreeMap<usize, Vec<Formula>> = BTreeMap::new();
    for s in &seeds {
        for c in &s.classes {
            if let Some(r) = c.explanation.report() {
                per_class.entry(r.class).or_default().push(r.formula.clone());
            }
        }
    }
    let consistency: Vec<ClassConsistency> = (0..data.n_classes())
        .map(|class| ClassConsistency {
            class,
            class_name: data.class_names[class].clone(),
            consistency: per_class
                .get(&class)
                .filter(|fs| fs.len() >= 2)
                .and_then(|fs| crate::metrics::consistency(fs).ok()),
        })
        .collect();
    for s in &mut seeds {
        for c in &mut s.classes {
            let class = c.explanation.class();
            if let Some(m) = c.metrics.as_mut() {
                m.consistency = consistency[class].consistency;
            }
        }
    }

    Ok(RunReport {
        version: VERSION.into(),
        config: config.clone(),
        seeds,
        consistency,
    })
}

/// Path of the side file holding one class's explanation for one seed.
pub fn class_report_path(out: &Path, seed: u64, class: usize) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
    out.with_file_name(format!("{stem}.seed{seed}.class{class}.json"))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

/// `train`: builds the report, writes it to `config.out` plus one side file
/// per seed and class.
pub fn run_train_explain(config: &RunConfig) -> Result<RunReport, CliError> {
    let report = build_report(config)?;
    write_json(&config.out, &report)?;
    for s in &report.seeds {
        for c in &s.classes {
            write_json(&class_report_path(&config.out, s.seed, c.explanation.class()), c)?;
        }
    }
    Ok(report)
}

/// `eval-formula`: accuracy of `formula` for `class` (a class name or index).
pub fn run_eval_formula(
    formula: &str,
    data_path: &Path,
    label_column: &str,
    class: &str,
    threshold: f64,
) -> Result<f64, CliError> {
    let data = load_csv(data_path, label_column)?;
    let f = parse(formula, &data.concept_names).map_err(|e| CliError::Usage(e.to_string()))?;
    let class_idx = data
        .class_names
        .iter()
        .position(|c| c == class)
        .or_else(|| class.parse::<usize>().ok().filter(|&i| i < data.n_classes()))
        .ok_or_else(|| {
            CliError::Usage(format!(
                "unknown class '{class}'; known classes: {}",
                data.class_names.join(", ")
            ))
        })?;
    let (acc, _) = test_explanation(&f, &data.x, &data.y, class_idx, threshold)
        .map_err(|e| CliError::Data(e.to_string()))?;
    Ok(acc)
}

/// `simplify`: minimized DNF text. Without `names`, identifiers are numbered
/// in order of first appearance.
pub fn run_simplify(formula: &str, names: Option<&[String]>) -> Result<String, CliError> {
    let (f, names) = match names {
        Some(n) => (parse(formula, n), n.to_vec()),
        None => match parse_infer_names(formula) {
            Ok((f, n)) => (Ok(f), n),
            Err(e) => (Err(e), Vec::new()),
        },
    };
    let f = f.map_err(|e| CliError::Usage(e.to_string()))?;
    let s = simplify(&f).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(format(&s, &names))
}
