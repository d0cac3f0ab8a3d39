//! Train a sigmoid network, prune every neuron to two inputs, and compose
//! the per-neuron truth tables into a formula.
//!
//!     cargo run --release --example psi_network

use lenkit::data::Dataset;
use lenkit::extraction::psi_explain;
use lenkit::logic::{assignment_from_bits, evaluate, format};
use lenkit::nn::{psi_train_prune, PsiNetwork, TrainConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // y = (x1 & x2) | x3 over all eight assignments
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for bits in 0..8u32 {
        let a = assignment_from_bits(bits, 3);
        rows.push(a.iter().map(|&b| f64::from(u8::from(b))).collect::<Vec<f64>>());
        y.push(usize::from((a[0] && a[1]) || a[2]));
    }
    let data = Dataset::from_rows(&rows, y, 2)?;

    let cfg = TrainConfig {
        learning_rate: 0.05,
        epochs: 2000,
        ..TrainConfig::default()
    };
    let net = PsiNetwork::new(3, &[3], 2, 2, 3)?;
    let (net, history) = psi_train_prune(net, &data.x, &data.y, &cfg, 2)?;
    println!("final loss {:.4}, max fan-in {}", history[history.len() - 1], net.max_fan_in());
    println!("predictions: {:?}", net.predict(&data.x)?);

    let formulas = psi_explain(&net)?;
    for (c, f) in formulas.iter().enumerate() {
        println!("output {c}: {}", format(f, &data.concept_names));
    }
    let agree = (0..8u32).all(|bits| {
        let a = assignment_from_bits(bits, 3);
        let out = net.forward_boolean(&a);
        formulas.iter().zip(&out).all(|(f, &o)| evaluate(f, &a).unwrap() == o)
    });
    println!("formulas match the thresholded network on every input: {agree}");
    Ok(())
}
