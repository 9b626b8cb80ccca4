//! Command-line surface. All configuration goes through flags; there are
//! no environment variables.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "grit-dbscan",
    version,
    about = "Exact density-based clustering over a grid tree"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Cluster a dataset file and write one label per input point.
    Cluster(ClusterArgs),
    /// Generate a synthetic clustered dataset.
    Generate(GenerateArgs),
    /// Run randomized equivalence trials against the brute-force
    /// reference.
    Verify(VerifyArgs),
    /// Sweep one parameter axis and emit per-run statistics as CSV.
    Bench(BenchArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ClusterArgs {
    /// Input dataset: one point per line, comma-separated coordinates.
    #[arg(long)]
    pub input: PathBuf,
    /// Neighborhood radius (closed ball).
    #[arg(long)]
    pub eps: f64,
    /// Minimum neighborhood size for a core point (the point itself
    /// counts).
    #[arg(long)]
    pub minpts: usize,
    /// Algorithm: grit (breadth-first merge), grit-ldf (low-density-first
    /// merge), or brute (quadratic reference).
    #[arg(long, default_value = "grit")]
    pub variant: String,
    /// Output label file.
    #[arg(long)]
    pub output: PathBuf,
    /// Append a class column (C core, B border, N noise).
    #[arg(long)]
    pub classes: bool,
    /// Normalize every column onto the integer domain [0, 100000] first.
    #[arg(long)]
    pub normalize: bool,
    /// Approximate-merge slack; 0 keeps the result exact.
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    /// Seed for the merge probe choices (does not affect the result).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone)]
pub struct GenerateArgs {
    /// Number of points.
    #[arg(long)]
    pub n: usize,
    /// Dimension (at least 2).
    #[arg(long)]
    pub d: usize,
    /// Cluster density mode: simden or varden.
    #[arg(long, default_value = "simden")]
    pub mode: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output dataset file.
    #[arg(long)]
    pub output: PathBuf,
    /// Probability of starting a new cluster after each step.
    #[arg(long, default_value_t = 0.05)]
    pub restart_prob: f64,
    /// Points emitted per random-walk step.
    #[arg(long, default_value_t = 100)]
    pub points_per_step: usize,
    /// Ball radius around the walker (base radius in varden mode).
    #[arg(long, default_value_t = 1000.0)]
    pub step_radius: f64,
    /// Fraction of n appended as uniform noise.
    #[arg(long, default_value_t = 0.0)]
    pub noise_fraction: f64,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// Number of randomized trials.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Maximum points per trial.
    #[arg(long, default_value_t = 200)]
    pub max_n: usize,
    /// Master seed; per-trial seeds derive from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory receiving the minimal failing instance on failure.
    #[arg(long, default_value = "verify-failure")]
    pub repro_dir: PathBuf,
    /// Test instrumentation: inject a deliberate fault ("flip-core") to
    /// check that verification catches it.
    #[arg(long, hide = true)]
    pub inject_fault: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct BenchArgs {
    /// Swept axis: eps, minpts, or n.
    #[arg(long)]
    pub axis: String,
    /// Comma-separated axis values.
    #[arg(long)]
    pub values: String,
    /// Dataset file (mutually exclusive with the generator flags; an
    /// n-axis sweep always generates).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Normalize a file input onto [0, 100000] first.
    #[arg(long)]
    pub normalize: bool,
    /// Generator: number of points (required for eps/minpts sweeps
    /// without --input).
    #[arg(long)]
    pub gen_n: Option<usize>,
    #[arg(long, default_value_t = 3)]
    pub gen_d: usize,
    #[arg(long, default_value = "simden")]
    pub gen_mode: String,
    #[arg(long, default_value_t = 0)]
    pub gen_seed: u64,
    #[arg(long, default_value_t = 1000.0)]
    pub gen_step_radius: f64,
    #[arg(long, default_value_t = 0.1)]
    pub gen_restart_prob: f64,
    #[arg(long, default_value_t = 0.0)]
    pub gen_noise_fraction: f64,
    /// Base eps (overridden on the eps axis).
    #[arg(long)]
    pub eps: f64,
    /// Base minpts (overridden on the minpts axis).
    #[arg(long)]
    pub minpts: usize,
    /// grit or grit-ldf.
    #[arg(long, default_value = "grit")]
    pub variant: String,
    /// Runs per axis value; one CSV row per run.
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}
