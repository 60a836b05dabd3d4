//! `colosseum`: experiment runner for the teleportation relation, the
//! magic-square games, the fault-tolerant pipeline and the adversary toolkit.
//!
//! Exit codes: 0 success, 1 a checked assertion failed, 2 bad configuration.

mod commands;
mod config;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "colosseum", version, about = "Gate-teleportation relation experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Decide `(C, P) ∈ R` and print the exact outcome probability.
    Verify(VerifyArgs),
    /// Draw outputs of the ideal circuit.
    Sample(SampleArgs),
    /// Exact output distribution for `n ≤ 8`.
    Distribution(DistributionArgs),
    /// Classical values of the magic-square game and its variant.
    Games(GamesArgs),
    /// End-to-end success of the fault-tolerant circuit over a `(d, p)` grid, as CSV.
    ThresholdScan(ScanArgs),
    /// Locality report of a Colosseum layout.
    LocalityCheck(LocalityArgs),
    /// Statistics of the block-restriction process.
    Restrictions(RestrictionArgs),
    /// Ceiling experiment on random shallow circuits, or a light-cone survey.
    Adversary(AdversaryArgs),
    /// Runs a JSON config file (`{"schema": 1, "command": "...", <flags>}`).
    Run(RunArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VerifyArgs {
    /// Tuple length; checked against the parsed tuples when given.
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated Clifford words (`H`, `HS`, `Sdg`) or 5-bit codes.
    #[arg(long)]
    pub cliffords: String,
    /// Pauli string such as `XIZ`.
    #[arg(long)]
    pub paulis: String,
    /// Exit with 1 unless validity matches.
    #[arg(long)]
    pub expect_valid: Option<bool>,
}

#[derive(clap::ValueEnum, Debug, Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum SampleMethod {
    /// Sequential exact sampler.
    Ideal,
    /// Stabilizer simulation of the ring circuit.
    Circuit,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SampleArgs {
    #[arg(long)]
    pub cliffords: String,
    #[arg(long, default_value_t = 10)]
    pub shots: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = SampleMethod::Ideal)]
    pub method: SampleMethod,
    /// iid circuit noise (circuit method only).
    #[arg(long)]
    pub noise: Option<f64>,
    /// Exit with 1 if any sample falls outside the relation.
    #[arg(long)]
    pub check: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DistributionArgs {
    #[arg(long)]
    pub cliffords: String,
    /// List zero-probability outcomes too.
    #[arg(long)]
    pub all: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GamesArgs {
    /// Enumerate all deterministic strategies.
    #[arg(long)]
    pub brute_force: bool,
    /// Exit with 1 unless the magic-square value is 8/9 and every strategy pair has a witness.
    #[arg(long)]
    pub check: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ScanArgs {
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    /// Comma-separated odd distances.
    #[arg(long, default_value = "3,5")]
    pub d: String,
    /// Comma list, or `lo..hi` for a log-spaced grid of `--points` values.
    #[arg(long, default_value = "1e-4..1e-2")]
    pub p: String,
    #[arg(long, default_value_t = 5)]
    pub points: usize,
    /// Trials per cell; accepts `1e5`.
    #[arg(long, default_value = "1e4")]
    pub trials: String,
    #[arg(long)]
    pub seed: u64,
    /// CSV destination instead of stdout.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    /// Exit with 1 unless each row is non-increasing in `p` within the Wilson intervals.
    #[arg(long)]
    pub check_monotone: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct LocalityArgs {
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    #[arg(long, default_value_t = 1.5)]
    pub kappa: f64,
    #[arg(long, default_value_t = 1.0)]
    pub delta_out: f64,
    #[arg(long, default_value_t = 1.0)]
    pub delta_r: f64,
    #[arg(long, default_value_t = colosseum::geometry::DEFAULT_OCCUPANCY_BOUND)]
    pub occupancy_bound: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RestrictionArgs {
    /// Number of 5-bit blocks.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Fixed `p_*`; otherwise derived from `--size` and `--depth`.
    #[arg(long)]
    pub p_star: Option<f64>,
    /// Circuit size `s` for the derived parameters.
    #[arg(long)]
    pub size: Option<f64>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    pub runs: u64,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct AdversaryArgs {
    /// Number of Clifford blocks (input `5n` bits, output `2n` bits).
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub dags: u64,
    #[arg(long, default_value_t = 2)]
    pub depth: usize,
    #[arg(long, default_value_t = 2)]
    pub fan_in: usize,
    #[arg(long, default_value = "1e4")]
    pub trials: String,
    #[arg(long)]
    pub seed: u64,
    /// Evaluate this JSON circuit instead of random ones.
    #[arg(long)]
    pub dag: Option<std::path::PathBuf>,
    /// Light-cone survey on `n`-input, `n`-output circuits of depth `⌊0.3·log₂ n⌋`.
    #[arg(long)]
    pub survey: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RunArgs {
    #[arg(long)]
    pub config: std::path::PathBuf,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    Assertion(String),
    Config(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Config(e.into())
    }
}

pub type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = commands::dispatch(&cli.command);
    eprintln!("wall-clock: {:.3}s", start.elapsed().as_secs_f64());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Assertion(msg)) => {
            eprintln!("assertion failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
