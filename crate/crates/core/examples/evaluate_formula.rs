//! Score a hand-written formula against a CSV dataset.
//!
//!     cargo run --example evaluate_formula

use lenkit::data::{load_csv, save_csv, Dataset, DEFAULT_LABEL_COLUMN};
use lenkit::logic::parse;
use lenkit::metrics::{fidelity, test_explanation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rows = [
        [0.9, 0.1, 0.8],
        [0.7, 0.6, 0.1],
        [0.2, 0.9, 0.7],
        [0.1, 0.2, 0.9],
        [0.8, 0.3, 0.6],
        [0.3, 0.4, 0.2],
    ];
    let mut data = Dataset::from_rows(&rows, vec![1, 0, 0, 0, 1, 0], 2)?;
    data.concept_names = vec!["round".into(), "red".into(), "shiny".into()];

    let path = std::env::temp_dir().join("lenkit_evaluate_formula.csv");
    save_csv(&data, &path, DEFAULT_LABEL_COLUMN)?;
    let data = load_csv(&path, DEFAULT_LABEL_COLUMN)?;
    println!("{} rows, concepts {:?}, classes {:?}", data.len(), data.concept_names, data.class_names);

    for text in ["round & shiny", "round & ~red", "shiny"] {
        let f = parse(text, &data.concept_names)?;
        let (acc, preds) = test_explanation(&f, &data.x, &data.y, 1, 0.5)?;
        let truth: Vec<bool> = data.y.iter().map(|&c| c == 1).collect();
        println!("{text:>16}: accuracy {acc:.3}, agreement with labels {:.3}", fidelity(&preds, &truth)?);
    }
    std::fs::remove_file(&path)?;
    Ok(())
}
