use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lenkit::cli::{run_eval_formula, run_simplify, run_train_explain, CliError, ModelKind, RunConfig, VERSION};

#[derive(Parser)]
#[command(name = "lenkit", version = VERSION, about = "Train concept networks and extract logic explanations")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train over one or more seeds, extract per-class formulas, write a JSON report.
    Train {
        /// JSON run configuration; flags below override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        label_column: Option<String>,
        #[arg(long, value_enum)]
        model: Option<ModelKind>,
        /// Comma-separated hidden widths, e.g. 10,4
        #[arg(long, value_delimiter = ',')]
        hidden: Option<Vec<usize>>,
        #[arg(long)]
        lr: Option<f64>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        entropy_weight: Option<f64>,
        #[arg(long)]
        fan_in: Option<usize>,
        /// Train,validation,test fractions, e.g. 0.6,0.2,0.2
        #[arg(long, value_delimiter = ',', num_args = 1)]
        split: Option<Vec<f64>>,
        /// Repeat or comma-separate for several seeds.
        #[arg(long, value_delimiter = ',')]
        seed: Option<Vec<u64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Accuracy of a formula as a classifier for one class.
    EvalFormula {
        #[arg(long)]
        formula: String,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = lenkit::data::DEFAULT_LABEL_COLUMN)]
        label_column: String,
        /// Class name or index.
        #[arg(long)]
        class: String,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
    },
    /// Minimize a formula to DNF.
    Simplify {
        #[arg(long)]
        formula: String,
        /// Comma-separated concept names; inferred from the formula if omitted.
        #[arg(long, value_delimiter = ',')]
        names: Option<Vec<String>>,
    },
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Train {
            config,
            data,
            label_column,
            model,
            hidden,
            lr,
            epochs,
            entropy_weight,
            fan_in,
            split,
            seed,
            out,
        } => {
            let mut c = match config {
                Some(p) => RunConfig::from_json_file(p)?,
                None => RunConfig::default(),
            };
            if let Some(v) = data {
                c.data = v;
            }
            if let Some(v) = label_column {
                c.label_column = v;
            }
            if let Some(v) = model {
                c.model = v;
            }
            if let Some(v) = hidden {
                c.hidden = v;
            }
            if let Some(v) = lr {
                c.learning_rate = v;
            }
            if let Some(v) = epochs {
                c.epochs = v;
            }
            if let Some(v) = entropy_weight {
                c.entropy_weight = v;
            }
            if let Some(v) = fan_in {
                c.fan_in = v;
            }
            if let Some(v) = split {
                c.split = v
                    .try_into()
                    .map_err(|_| CliError::Usage("--split takes exactly three fractions".into()))?;
            }
            if let Some(v) = seed {
                c.seeds = v;
            }
            if let Some(v) = out {
                c.out = v;
            }
            let report = run_train_explain(&c)?;
            for s in &report.seeds {
                for r in s.classes.iter().filter_map(|c| c.explanation.report()) {
                    println!("seed {} class {}: {}", s.seed, r.class_name, r.formula_text);
                }
            }
            println!("report written to {}", c.out.display());
        }
        Command::EvalFormula {
            formula,
            data,
            label_column,
            class,
            threshold,
        } => {
            let acc = run_eval_formula(&formula, &data, &label_column, &class, threshold)?;
            println!("{acc:?}");
        }
        Command::Simplify { formula, names } => {
            println!("{}", run_simplify(&formula, names.as_deref())?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(args.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
