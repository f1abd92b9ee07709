//! Command-line front end: verdicts as JSON, region boundaries and parameter
//! sweeps as CSV, optional SVG plots.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    BadInput(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::BadInput(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}

impl From<icbounds::Error> for CliError {
    fn from(e: icbounds::Error) -> Self {
        match e {
            icbounds::Error::EmptyRegion(_) => CliError::Internal(e.to_string()),
            _ => CliError::BadInput(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "icbounds", version, about = "Bounds and sum-rate capacity of Gaussian interference channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report which capacity result applies to a channel (JSON).
    Classify(ClassifyArgs),
    /// Inner and outer region boundaries (CSV, optional SVG).
    Region(RegionArgs),
    /// Evaluate a metric over a grid of one channel parameter (CSV).
    Sweep(SweepArgs),
    /// m-user noisy-interference search, optionally checked by a grid oracle (JSON).
    Murate(MurateArgs),
    /// Symmetric noisy-interference thresholds.
    Threshold(ThresholdArgs),
}

/// A channel given by flags or by a JSON file.
#[derive(Debug, Clone, Default, Args)]
pub struct ChannelArgs {
    /// Crosstalk gain into receiver 1.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Crosstalk gain into receiver 2.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub p1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub p2: Option<f64>,
    /// JSON channel description.
    #[arg(long, conflicts_with_all = ["a", "b", "p1", "p2", "db"])]
    pub config: Option<PathBuf>,
    /// Read --a and --b in dB.
    #[arg(long)]
    pub db: bool,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Number of weights μ, log-spaced on [1/64, 64].
    #[arg(long, default_value_t = 65)]
    pub mu_grid: usize,
    /// Number of weights per closed-form bound family.
    #[arg(long, default_value_t = 9)]
    pub eta_grid: usize,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// JSON list of `[c1, c2, value]` half-planes `c1·R1 + c2·R2 ≤ value`,
    /// used instead of a channel.
    #[arg(long, conflicts_with_all = ["a", "b", "p1", "p2", "config", "db"])]
    pub constraints: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    A,
    B,
    P1,
    P2,
    /// `a = b`.
    SymmetricA,
    /// `P1 = P2`.
    SymmetricP,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    /// Smallest sum-rate upper bound from the genie families.
    SumUpper,
    /// Sum rate when both receivers treat interference as noise.
    SumTin,
    /// Best orthogonal time/frequency-sharing sum rate.
    TdmBest,
    /// Capacity verdict.
    Verdict,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Base channel; the swept parameter may be omitted.
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long, value_enum)]
    pub param: SweepParam,
    #[arg(long, allow_hyphen_values = true)]
    pub from: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub to: f64,
    #[arg(long)]
    pub points: usize,
    #[arg(long, value_enum)]
    pub metric: Metric,
    /// Log-spaced grid.
    #[arg(long)]
    pub log: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MurateArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Also run the exhaustive grid oracle at this many points per axis.
    #[arg(long)]
    pub oracle_resolution: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    /// Power for which to find the largest symmetric gain.
    #[arg(long)]
    pub p: Option<f64>,
    /// Gain for which to find the largest symmetric power.
    #[arg(long)]
    pub c: Option<f64>,
    /// Number of users.
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long)]
    pub json: bool,
}

/// Runs one command, writing its primary output to `stdout`.
pub fn run(cli: Cli, stdout: &mut dyn std::io::Write) -> Result<(), CliError> {
    match cli.command {
        Command::Classify(args) => commands::classify(&args, stdout),
        Command::Region(args) => commands::region(&args, stdout),
        Command::Sweep(args) => commands::sweep(&args, stdout),
        Command::Murate(args) => commands::murate(&args, stdout),
        Command::Threshold(args) => commands::threshold(&args, stdout),
    }
}
