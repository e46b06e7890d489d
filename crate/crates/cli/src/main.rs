//! Command-line front end: model training, crossbar simulation, variation
//! experiments, and comparison-table reporting.
//!
//! Exit codes: 0 on success, 2 for input errors (missing or malformed
//! files, bad flag values), 3 for violated simulator invariants.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

pub const EXIT_INPUT_ERROR: u8 = 2;
pub const EXIT_INVARIANT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(
    name = "boolcur",
    version,
    about = "Behavioral simulator for ReRAM crossbar Tsetlin machine inference"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a reference model on a dataset file and write a model file
    Train(TrainArgs),
    /// Run crossbar inference over a dataset and emit traces and an
    /// aggregate energy report
    Simulate(SimulateArgs),
    /// Run a seeded variation experiment and emit CSV reports
    Montecarlo(MontecarloArgs),
    /// Merge aggregate result files into a comparison table
    Report(ReportArgs),
    /// Generate a desk-scale dataset file
    Dataset(DatasetArgs),
}

#[derive(Args)]
struct TrainArgs {
    /// Training dataset (CSV: label,f0,f1,...)
    #[arg(long)]
    dataset: PathBuf,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Clauses per class (even)
    #[arg(long, default_value_t = 6)]
    clauses_per_class: usize,
    #[arg(long, default_value_t = 15.0)]
    specificity: f64,
    #[arg(long, default_value_t = 8)]
    threshold: i32,
    /// Automaton states per action side
    #[arg(long, default_value_t = 100)]
    states: u32,
    #[arg(long, default_value_t = 150)]
    epochs: u32,
    /// Thermometer thresholds per feature, derived from training quantiles.
    /// Omitted: binary data passes through, real-valued data gets 4 levels.
    #[arg(long)]
    quantile_levels: Option<usize>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Model file (required unless --paper-aggregates)
    #[arg(long, required_unless_present = "paper_aggregates")]
    model: Option<PathBuf>,
    /// Dataset to run inference on (required unless --paper-aggregates)
    #[arg(long, required_unless_present = "paper_aggregates")]
    dataset: Option<PathBuf>,
    /// Run configuration file (TOML)
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Digital-oracle inference only (no analog path)
    #[arg(long)]
    oracle: bool,
    /// Reproduce the efficiency columns from published aggregate values for
    /// the named dataset instead of simulating
    #[arg(long, value_name = "NAME")]
    paper_aggregates: Option<String>,
    /// Published baseline constants file (default: data/baselines.toml when
    /// present)
    #[arg(long)]
    baselines: Option<PathBuf>,
    /// Cells per partial-clause column (overrides the config file)
    #[arg(long)]
    column_width: Option<usize>,
    /// Columns evaluated in parallel per step (overrides the config file)
    #[arg(long)]
    parallelism: Option<u64>,
    /// Dataset name used in reports and baseline lookup (default: dataset
    /// file stem)
    #[arg(long)]
    name: Option<String>,
    /// Write per-datapoint inference traces
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct MontecarloArgs {
    /// Experiment kind: c2c | d2d | pulse-sweep | margin | accuracy
    #[arg(long)]
    kind: String,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    cycles: Option<u64>,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    #[arg(long)]
    column_width: Option<usize>,
    /// Trained model (accuracy experiment)
    #[arg(long)]
    model: Option<PathBuf>,
    /// Dataset (accuracy experiment)
    #[arg(long)]
    dataset: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Aggregate result files from `simulate`
    #[arg(long, num_args = 1.., required = true)]
    inputs: Vec<PathBuf>,
    /// Published baseline constants file for the comparison columns
    #[arg(long)]
    baselines: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct DatasetArgs {
    /// Generator name (currently: noisy-xor)
    generator: String,
    #[arg(long, default_value_t = 24)]
    features: usize,
    #[arg(long, default_value_t = 4000)]
    samples: usize,
    /// Label flip probability
    #[arg(long, default_value_t = 0.4)]
    noise: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output CSV path
    #[arg(long)]
    out_file: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(args) => commands::train::run(args),
        Command::Simulate(args) => commands::simulate::run(args),
        Command::Montecarlo(args) => commands::montecarlo::run(args),
        Command::Report(args) => commands::report::run(args),
        Command::Dataset(args) => commands::dataset::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            if err.is_input_error() {
                ExitCode::from(EXIT_INPUT_ERROR)
            } else {
                ExitCode::from(EXIT_INVARIANT_ERROR)
            }
        }
    }
}
