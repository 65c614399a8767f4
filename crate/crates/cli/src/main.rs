//! Command-line runner for the compressed-space QAOA experiments.

mod config;
mod instances;
mod output;
mod report;
mod run;
mod train;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "csqaoa", version, about = "Compressed-space QAOA simulation laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize QAOA variants over an instance ensemble.
    RunQaoa(Common),
    /// Train compressors for single constraints and write a database.
    TrainCompressor(Common),
    /// Evaluate coherent optima under two-qubit depolarizing noise.
    SweepNoise(Common),
    /// Merge result tables into long-format plot data.
    Report(Common),
    /// Write instance ensembles to files.
    GenInstances(Common),
    /// Brute-force optima of instances.
    Oracle(Common),
}

#[derive(Args, Clone, Debug)]
pub struct Common {
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Base seed; overrides the config's `seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; overrides the config's `jobs`.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0} compressor(s) below the training threshold")]
    Training(usize),
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(f) = cause.downcast_ref::<Failure>() {
            return match f {
                Failure::Config(_) => 2,
                Failure::Training(_) => 3,
            };
        }
        if let Some(e) = cause.downcast_ref::<csqaoa::Error>() {
            return match e {
                csqaoa::Error::SizeCap { .. } => 4,
                csqaoa::Error::InvalidArgument(_) | csqaoa::Error::ErrorRateOutOfRange(_) => 2,
                _ => 1,
            };
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::RunQaoa(c) => run::run_qaoa(&c),
        Command::TrainCompressor(c) => train::train_compressor(&c),
        Command::SweepNoise(c) => run::sweep_noise(&c),
        Command::Report(c) => report::report(&c),
        Command::GenInstances(c) => instances::gen_instances(&c),
        Command::Oracle(c) => instances::oracle(&c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
