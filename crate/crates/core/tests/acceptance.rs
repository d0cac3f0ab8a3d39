//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::{
    bits, is_xor, max_relative_error, oracle_accuracy, oracle_eval, random_entropy_case, random_formula,
    random_unit_rows, xor_path, xor_run,
};
use lenkit::cli::{build_report, RunConfig};
use lenkit::extraction::psi_explain;
use lenkit::logic::{quine_mccluskey, Formula};
use lenkit::metrics::test_explanation;
use lenkit::nn::{entropy_logic_loss, DenseLayer, EntropyLinearLayer, Matrix, Parameterized, PsiNetwork};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn xor_end_to_end() -> Outcome {
    let mut passed = 0;
    let mut slowest = Duration::ZERO;
    let mut failures = Vec::new();
    for seed in 0..10 {
        let t = Instant::now();
        let run = xor_run(seed);
        slowest = slowest.max(t.elapsed());
        let ok = run.all_correct && run.formula.as_ref().is_some_and(is_xor);
        if ok {
            passed += 1;
        } else {
            failures.push(format!("seed {seed}: correct={} formula={}", run.all_correct, run.formula_text));
        }
    }
    let detail = format!("{passed}/10 seeds, slowest seed {:.2}s {failures:?}", slowest.as_secs_f64());
    if passed >= 9 && slowest < Duration::from_secs(5) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn simplify_cli() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_lenkit"))
        .args(["simplify", "--formula", "(person & nose) | (~person & nose)"])
        .output()
        .map_err(|e| e.to_string())?;
    let stdout = String::from_utf8_lossy(&out.stdout);
    if out.status.success() && stdout == "nose\n" {
        Ok("printed \"nose\"".into())
    } else {
        Err(format!("status {:?}, stdout {stdout:?}", out.status.code()))
    }
}

fn count_literals(f: &Formula) -> usize {
    match f {
        Formula::Const(_) => 0,
        Formula::Var(_) => 1,
        Formula::Not(g) => count_literals(g),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().map(count_literals).sum(),
    }
}

fn minimizer_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..500 {
        let k = rng.gen_range(4..=8);
        let (p_on, p_dc) = (rng.gen_range(0.0..0.6), rng.gen_range(0.0..0.3));
        let (mut on, mut dc) = (Vec::new(), Vec::new());
        for v in 0..1u32 << k {
            let r: f64 = rng.gen();
            if r < p_on {
                on.push(v);
            } else if r < p_on + p_dc {
                dc.push(v);
            }
        }
        let f = quine_mccluskey(&on, &dc, k).map_err(|e| format!("case {case}: {e}"))?;
        for v in 0..1u32 << k {
            if dc.contains(&v) {
                continue;
            }
            if oracle_eval(&f, &bits(v, k)) != on.contains(&v) {
                return Err(format!("case {case}: k={k}, wrong value at row {v}"));
            }
        }
        let lits = count_literals(&f);
        if lits > on.len() * k {
            return Err(format!("case {case}: {lits} literals > trivial {}", on.len() * k));
        }
    }
    Ok("500 functions sound, never longer than the trivial DNF".into())
}

fn gradient_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for case in 0..50 {
        let (model, x, y, lambda) = random_entropy_case(&mut rng, case);
        let (_, grad) = model.loss_and_grad(&x, &y, lambda).map_err(|e| e.to_string())?;
        let loss = |p: &[f64]| {
            let mut m = model.clone();
            m.set_params(p);
            m.loss(&x, &y, lambda).unwrap().total
        };
        let err = max_relative_error(&model.params(), &grad, loss, 1e-5);
        if !(err < 1e-4) {
            return Err(format!("case {case}: relative error {err:e}"));
        }
        worst = worst.max(err);
    }
    Ok(format!("50 models, worst relative error {worst:.2e}"))
}

fn entropy_layer(gamma: Matrix, temperature: f64) -> EntropyLinearLayer {
    let (c, k) = gamma.shape();
    let maps = (0..c).map(|_| DenseLayer::new(Matrix::zeros(1, k), vec![0.0]).unwrap()).collect();
    EntropyLinearLayer::from_parts(gamma, maps, temperature).unwrap()
}

fn entropy_bounds() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_uniform: f64 = 0.0;
    for case in 0..1000 {
        let c = rng.gen_range(1..=5);
        let k = rng.gen_range(1..=10);
        let scale = [0.1, 1.0, 10.0, 100.0, 1e4][rng.gen_range(0..5)];
        let tau = rng.gen_range(0.1..2.0);
        let values = (0..c * k).map(|_| rng.gen_range(-scale..scale)).collect();
        let layer = entropy_layer(Matrix::from_vec(c, k, values).unwrap(), tau);
        let bound = c as f64 * (k as f64).ln();
        let h = layer.entropy();
        if !(0.0..=bound).contains(&h) {
            return Err(format!("case {case}: entropy {h} outside [0, {bound}]"));
        }
        let level = rng.gen_range(-5.0..5.0);
        let uniform = entropy_layer(Matrix::from_vec(c, k, vec![level; c * k]).unwrap(), tau);
        let gap = (uniform.entropy() - bound).abs();
        worst_uniform = worst_uniform.max(gap);
        if gap > 1e-10 {
            return Err(format!("case {case}: uniform gamma off by {gap:e}"));
        }
    }
    // the model-level accessor reads the same quantity
    let model = lenkit::nn::EntropyModel::new(3, 2, &Default::default(), 0).unwrap();
    let gap = (entropy_logic_loss(&model) - 2.0 * 3f64.ln()).abs();
    if gap > 1e-10 {
        return Err(format!("fresh model entropy off by {gap:e}"));
    }
    Ok(format!("1000 matrices within bounds, uniform gap {worst_uniform:.1e}"))
}

fn test_explanation_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for case in 0..100 {
        let k = rng.gen_range(1..=8);
        let n = rng.gen_range(1..=64);
        let n_classes = rng.gen_range(2..=3);
        let f = random_formula(&mut rng, k, 3);
        let rows: Vec<Vec<f64>> = if rng.gen_bool(0.5) {
            (0..n).map(|_| (0..k).map(|_| f64::from(u8::from(rng.gen::<bool>()))).collect()).collect()
        } else {
            random_unit_rows(&mut rng, n, k)
        };
        let y: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n_classes)).collect();
        let class = rng.gen_range(0..n_classes);
        let x = Matrix::from_vec(n, k, rows.concat()).unwrap();
        let (acc, _) = test_explanation(&f, &x, &y, class, 0.5).map_err(|e| e.to_string())?;
        let expected = oracle_accuracy(&f, &rows, &y, class, 0.5);
        if acc != expected {
            return Err(format!("case {case}: {acc} vs oracle {expected}"));
        }
    }
    Ok("100 cases match exactly".into())
}

fn psi_soundness() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..20 {
        let k = rng.gen_range(2..=6);
        let hidden: Vec<usize> = (0..rng.gen_range(0..=2)).map(|_| rng.gen_range(1..=4)).collect();
        let c = rng.gen_range(1..=3);
        let mut net = PsiNetwork::new(k, &hidden, c, 2, case).map_err(|e| e.to_string())?;
        let scale = rng.gen_range(1.0..8.0);
        let p: Vec<f64> = net.params().iter().map(|w| w * scale).collect();
        net.set_params(&p);
        net.prune(2).map_err(|e| e.to_string())?;
        if net.max_fan_in() > 2 {
            return Err(format!("case {case}: fan-in {} after pruning", net.max_fan_in()));
        }
        let formulas = psi_explain(&net).map_err(|e| e.to_string())?;
        for v in 0..1u32 << k {
            let input = bits(v, k);
            let expected = net.forward_boolean(&input);
            for (o, f) in formulas.iter().enumerate() {
                if oracle_eval(f, &input) != expected[o] {
                    return Err(format!("case {case}: output {o} disagrees at input {v}"));
                }
            }
        }
    }
    Ok(format!("20 networks agree on every input in {:.2}s", t.elapsed().as_secs_f64()))
}

fn determinism() -> Outcome {
    for seed in [0, 1, 2] {
        let (a, b) = (xor_run(seed), xor_run(seed));
        if a.formula_text != b.formula_text {
            return Err(format!("seed {seed}: {} vs {}", a.formula_text, b.formula_text));
        }
        let same = a.history.len() == b.history.len()
            && a.history.iter().zip(&b.history).all(|(x, y)| x.to_bits() == y.to_bits());
        if !same {
            return Err(format!("seed {seed}: loss histories differ"));
        }
    }
    let config = RunConfig {
        data: xor_path(),
        split: [1.0, 0.0, 0.0],
        seeds: vec![0, 1],
        ..RunConfig::default()
    };
    let render = || serde_json::to_string(&build_report(&config).unwrap()).unwrap();
    if render() != render() {
        return Err("JSON reports differ".into());
    }
    Ok("formulas, loss histories and reports identical".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("xor end-to-end", xor_end_to_end),
        ("simplify prints nose", simplify_cli),
        ("minimizer soundness", minimizer_soundness),
        ("gradient check", gradient_check),
        ("entropy loss bounds", entropy_bounds),
        ("test_explanation oracle", test_explanation_oracle),
        ("psi extraction soundness", psi_soundness),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = check();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} [{secs:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
