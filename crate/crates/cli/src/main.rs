use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use combx::experiment::{self, CompareConfig, Dataset, ModelKind};
use combx::tnn::{self, AdamConfig, TrainConfig};

#[derive(Parser)]
#[command(name = "combx", version, about = "Simplicial vs combinatorial shift operators on random Delaunay complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset (complex, signals, labels, split) as JSON.
    Generate {
        #[arg(long, default_value_t = 200)]
        n_points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train one network on a dataset file.
    Train {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, value_parser = parse_kind)]
        model: ModelKind,
        #[command(flatten)]
        hyper: Hyper,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        metrics: Option<PathBuf>,
    },
    /// Train both networks over several independent runs and write a CSV report.
    Compare {
        #[arg(long, default_value_t = 200)]
        n_points: usize,
        #[arg(long, default_value_t = 3)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        hyper: Hyper,
        #[arg(long)]
        report: PathBuf,
    },
    /// Print cell counts, the Euler check, label balance and operator shapes.
    Inspect {
        #[arg(long)]
        dataset: PathBuf,
    },
}

#[derive(Args)]
struct Hyper {
    #[arg(long, default_value_t = 16)]
    hidden: usize,
    #[arg(long, default_value_t = 1000)]
    epochs: usize,
    #[arg(long, default_value_t = 0.001)]
    lr: f64,
    /// Use the degree-normalised shift operator.
    #[arg(long)]
    normalize: bool,
}

impl Hyper {
    fn train_config(&self, seed: u64) -> Result<TrainConfig> {
        anyhow::ensure!(self.hidden >= 1, "usage error: --hidden must be at least 1");
        anyhow::ensure!(self.lr > 0.0 && self.lr.is_finite(), "usage error: --lr must be positive");
        Ok(TrainConfig {
            hidden: self.hidden,
            epochs: self.epochs,
            adam: AdamConfig { lr: self.lr, ..AdamConfig::default() },
            seed,
        })
    }
}

fn parse_kind(s: &str) -> Result<ModelKind, String> {
    s.parse()
}

fn read_dataset(path: &Path) -> Result<Dataset> {
    let text = fs::read_to_string(path).with_context(|| format!("I/O error: cannot read {}", path.display()))?;
    Dataset::from_json(&text).with_context(|| format!("format error in {}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("I/O error: cannot write {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("I/O error: cannot write {}", path.display()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { n_points, seed, out } => {
            let dataset = experiment::generate_dataset(n_points, seed)?;
            write_text(&out, &dataset.to_json())?;
            let counts = dataset.complex.rank_counts();
            println!("wrote {} ({} cells: {:?})", out.display(), dataset.complex.num_cells(), counts);
        }
        Command::Train { dataset, model, hyper, seed, out, metrics } => {
            let data = read_dataset(&dataset)?;
            let config = hyper.train_config(seed)?;
            let (outcome, test_accuracy) = experiment::train_model(&data, model, &config, hyper.normalize)?;
            write_text(&out, &outcome.model.to_file().to_json())?;
            if let Some(path) = metrics {
                let mut w = create(&path)?;
                tnn::write_metrics_csv(&outcome.metrics, &mut w)
                    .and_then(|_| w.flush().map_err(Into::into))
                    .with_context(|| format!("I/O error: cannot write {}", path.display()))?;
            }
            println!("model {model}: best epoch {}, test accuracy {test_accuracy}", outcome.best_epoch);
        }
        Command::Compare { n_points, runs, seed, hyper, report } => {
            anyhow::ensure!(runs >= 1, "usage error: --runs must be at least 1");
            let config = CompareConfig {
                n_points,
                runs,
                base_seed: seed,
                train: hyper.train_config(seed)?,
                normalize: hyper.normalize,
            };
            let result = experiment::run_comparison(&config)?;
            let mut w = create(&report)?;
            result
                .write_csv(&mut w)
                .map_err(anyhow::Error::from)
                .and_then(|_| w.flush().map_err(Into::into))
                .with_context(|| format!("I/O error: cannot write {}", report.display()))?;
            println!(
                "sc mean {:.4}, cc mean {:.4}, gap {:+.4}, cc wins {}/{}",
                result.mean_sc,
                result.mean_cc,
                result.gap(),
                result.cc_wins(),
                runs
            );
        }
        Command::Inspect { dataset } => {
            let data = read_dataset(&dataset)?;
            print!("{}", data.summary()?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
