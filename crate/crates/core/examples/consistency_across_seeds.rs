//! Explanations from several seeds, and how much their concept sets overlap.
//!
//!     cargo run --release --example consistency_across_seeds

use lenkit::data::Dataset;
use lenkit::extraction::{explain_class, Thresholds};
use lenkit::logic::Formula;
use lenkit::metrics::consistency;
use lenkit::nn::{train, EntropyArch, EntropyModel, TrainConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // y = x1 & ~x3, x2 is noise
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for bits in 0..8u32 {
        let r: Vec<f64> = (0..3).map(|i| f64::from(bits >> i & 1)).collect();
        y.push(usize::from(r[0] == 1.0 && r[2] == 0.0));
        rows.push(r);
    }
    let data = Dataset::from_rows(&rows, y, 2)?;
    let empty = data.subset(&[]);

    let mut formulas: Vec<Formula> = Vec::new();
    for seed in 0..5 {
        let cfg = TrainConfig { seed, ..TrainConfig::default() };
        let mut model = EntropyModel::new(3, 2, &EntropyArch::default(), seed)?;
        train(&mut model, &data.x, &data.y, &cfg)?;
        let report = explain_class(&model, &data, &empty, 1, Thresholds::default())?;
        println!("seed {seed}: {}  (accuracy {:.2})", report.formula_text, report.train_accuracy);
        formulas.push(report.formula);
    }
    println!("consistency: {:.3}", consistency(&formulas)?);
    Ok(())
}
