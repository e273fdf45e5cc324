//! `mccle`: dataset generation, training, evaluation and posterior heatmaps.

mod commands;
mod failure;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mccle_core::ModelKind;

use failure::Failure;

#[derive(Debug, Parser)]
#[command(name = "mccle", version, about = "Full-posterior transmitter localization")]
struct Cli {
    /// Master seed recorded in every artifact.
    #[arg(long, global = true, default_value_t = 0, env = "MCCLE_SEED")]
    seed: u64,

    /// Worker threads (0 = one per core). Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0, env = "MCCLE_WORKERS")]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a JSONL dataset (plus a `.meta.json` sidecar).
    Gen(GenArgs),
    /// Train a scoring head; writes a checkpoint and `<out>.history.csv`.
    Train(TrainArgs),
    /// Grid and random-candidate metrics as JSON.
    Eval(EvalArgs),
    /// Relative log-probability grids for the reference geometries or one
    /// user geometry.
    Heatmap(HeatmapArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 10_000, env = "MCCLE_N")]
    pub n: usize,
    #[arg(long, env = "MCCLE_OUT")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long, env = "MCCLE_DATASET")]
    pub dataset: PathBuf,
    #[arg(long, default_value = "mccle", env = "MCCLE_MODEL")]
    pub model: ModelKind,
    #[arg(long, default_value_t = 200, env = "MCCLE_EPOCHS")]
    pub epochs: usize,
    /// Defaults to 0.01 for mccle and 0.002 for the Gaussian heads.
    #[arg(long, env = "MCCLE_LR")]
    pub lr: Option<f64>,
    #[arg(long, default_value_t = 128, env = "MCCLE_K_CANDIDATES")]
    pub k_candidates: usize,
    #[arg(long, env = "MCCLE_BATCH_SIZE")]
    pub batch_size: Option<usize>,
    #[arg(long, env = "MCCLE_WEIGHT_DECAY")]
    pub weight_decay: Option<f64>,
    #[arg(long, env = "MCCLE_OUT")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, env = "MCCLE_DATASET")]
    pub dataset: PathBuf,
    #[arg(long, env = "MCCLE_CHECKPOINT", required_unless_present = "uniform", conflicts_with = "uniform")]
    pub checkpoint: Option<PathBuf>,
    /// Expected model kind; a checkpoint of another kind is rejected.
    #[arg(long, env = "MCCLE_MODEL")]
    pub model: Option<ModelKind>,
    /// Evaluate the constant-score (uniform posterior) baseline instead.
    #[arg(long)]
    pub uniform: bool,
    /// Grid spacing in meters.
    #[arg(long, default_value_t = mccle_core::eval::DEFAULT_GRID_SPACING)]
    pub spacing: f64,
    /// Candidate count of the random scheme.
    #[arg(long, default_value_t = mccle_core::eval::DEFAULT_RANDOM_K)]
    pub random_k: usize,
    #[arg(long, env = "MCCLE_OUT")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct HeatmapArgs {
    /// One or more checkpoints; each yields one file per geometry.
    #[arg(long = "checkpoint", env = "MCCLE_CHECKPOINT", required_unless_present = "uniform")]
    pub checkpoints: Vec<PathBuf>,
    #[arg(long, env = "MCCLE_MODEL")]
    pub model: Option<ModelKind>,
    /// Also emit the uniform baseline.
    #[arg(long)]
    pub uniform: bool,
    /// Single geometry `dx,dy,heading_deg` (meters, degrees) instead of the
    /// ten reference cases.
    #[arg(long, allow_hyphen_values = true)]
    pub geometry: Option<String>,
    #[arg(long, default_value_t = mccle_core::eval::DEFAULT_GRID_SPACING)]
    pub spacing: f64,
    /// Write a PPM image next to every CSV.
    #[arg(long)]
    pub ppm: bool,
    /// Output directory.
    #[arg(long, env = "MCCLE_OUT")]
    pub out: PathBuf,
}

fn run(cli: Cli) -> Result<(), Failure> {
    if cli.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.workers)
            .build_global()
            .map_err(|e| Failure::new(1, "runtime", e.to_string()))?;
    }
    match cli.command {
        Command::Gen(a) => commands::gen(&a, cli.seed),
        Command::Train(a) => commands::train(&a, cli.seed),
        Command::Eval(a) => commands::eval(&a, cli.seed),
        Command::Heatmap(a) => commands::heatmap(&a, cli.seed),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.report());
            ExitCode::from(f.code as u8)
        }
    }
}
