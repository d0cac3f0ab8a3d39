//! The library side of `lenkit train`: configure a run in code and inspect
//! the report without writing files.
//!
//!     cargo run --release --example run_report

use lenkit::cli::{build_report, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = RunConfig {
        data: concat!(env!("CARGO_MANIFEST_DIR"), "/data/xor.csv").into(),
        split: [1.0, 0.0, 0.0],
        seeds: vec![0, 1, 2],
        ..RunConfig::default()
    };
    let report = build_report(&config)?;
    for s in &report.seeds {
        for c in &s.classes {
            if let (Some(r), Some(m)) = (c.explanation.report(), &c.metrics) {
                println!(
                    "seed {} y={}: {}  accuracy {:.2} fidelity {:.2}",
                    s.seed, r.class_name, r.formula_text, m.accuracy, m.fidelity
                );
            }
        }
    }
    for c in &report.consistency {
        println!("class {} consistency {:?}", c.class_name, c.consistency);
    }
    println!("{}", serde_json::to_string_pretty(&report.seeds[0].model_accuracy)?);
    Ok(())
}
