//! Train an entropy-based network on XOR and read off one formula per class.
//!
//!     cargo run --release --example xor_explain

use lenkit::data::Dataset;
use lenkit::extraction::{concept_relevance, explain_all, Thresholds};
use lenkit::nn::{train, EntropyArch, EntropyModel, TrainConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rows = [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]];
    let data = Dataset::from_rows(&rows, vec![0, 1, 1, 0], 2)?;

    let cfg = TrainConfig::default();
    let mut model = EntropyModel::new(2, 2, &EntropyArch::default(), cfg.seed)?;
    let history = train(&mut model, &data.x, &data.y, &cfg)?;
    println!("loss: {:.4} -> {:.6}", history[0], history[history.len() - 1]);
    println!("predictions: {:?}", model.predict(&data.x)?);

    for class in 0..2 {
        let ranked = concept_relevance(&model, class)?;
        println!("class {class} attention: {ranked:?}");
    }
    // no held-out rows here, so selection falls back to the training set
    let empty = data.subset(&[]);
    for result in explain_all(&model, &data, &empty, Thresholds::default()) {
        match result.report() {
            Some(r) => println!(
                "y={} <-> {}   (accuracy {:.2}, complexity {})",
                r.class_name, r.formula_text, r.train_accuracy, r.complexity
            ),
            None => println!("class {}: no explanation", result.class()),
        }
    }
    Ok(())
}
