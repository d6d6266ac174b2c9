use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Environment variable holding the default base seed.
pub const SEED_ENV: &str = "XDOF_SEED";
pub const DEFAULT_SEED: u64 = 2024;

#[derive(Debug, Parser)]
#[command(name = "xdof", version, about = "Interference alignment simulators and sum-DoF regions for MIMO X networks")]
pub struct Cli {
    /// JSON file supplying defaults for any flag
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run seeded trials of a scheme and decode at every receiver
    Simulate(SimulateArgs),
    /// Sample an achievable region on a grid of normalized feedback delays
    Tradeoff(TradeoffArgs),
    /// Compare sum-DoF under four CSIT models for the two-user network
    Table(TableArgs),
    /// Run the invariant suites
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Stia2,
    Ria,
    Misox,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionKind {
    #[value(alias = "stia2")]
    Theorem1,
    #[value(alias = "ria")]
    Theorem2,
    #[value(alias = "misox")]
    Theorem3,
    Corollary1,
}

/// Node dimensions shared by several commands.
#[derive(Debug, Clone, Default, Args)]
pub struct Dims {
    /// Transmit antennas per transmitter (two-user network)
    #[arg(long = "A", alias = "a")]
    pub a: Option<usize>,
    /// Receive antennas per receiver (two-user network)
    #[arg(long = "B", alias = "b")]
    pub b: Option<usize>,
    /// Users (K-user SISO network)
    #[arg(long = "K", alias = "k")]
    pub k: Option<usize>,
    /// Transmitters (MISO network)
    #[arg(long = "M", alias = "m")]
    pub m: Option<usize>,
    /// Receivers (MISO network)
    #[arg(long = "N", alias = "n")]
    pub n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub scheme: Option<Scheme>,
    #[command(flatten)]
    pub dims: Dims,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Base seed; falls back to the config file, then $XDOF_SEED
    #[arg(long)]
    pub seed: Option<u64>,
    /// Coherence time in slots
    #[arg(long)]
    pub coherence: Option<u64>,
    /// Feedback delay in slots
    #[arg(long)]
    pub feedback_delay: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    pub threads: Option<usize>,
    /// Include per-trial decode reports (effective matrices included)
    #[arg(long)]
    pub reports: bool,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TradeoffArgs {
    #[arg(long, alias = "scheme", value_enum)]
    pub region: Option<RegionKind>,
    #[command(flatten)]
    pub dims: Dims,
    /// Comma-separated λ values, e.g. "0,1/3,0.5,1"
    #[arg(long)]
    pub grid: Option<String>,
    /// Uniform grid 0, 1/steps, ..., 1 when no explicit grid is given
    #[arg(long)]
    pub steps: Option<u32>,
    /// Multiply every DoF by this antenna-scaling factor
    #[arg(long)]
    pub scale: Option<u64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Comma-separated transmit antenna counts
    #[arg(long = "A", alias = "a", value_delimiter = ',')]
    pub a: Vec<usize>,
    /// Comma-separated receive antenna counts; every (A, B) pair is tabulated
    #[arg(long = "B", alias = "b", value_delimiter = ',')]
    pub b: Vec<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite to run (repeatable); all suites when omitted
    #[arg(long = "suite")]
    pub suites: Vec<String>,
    /// Override every Monte Carlo trial count
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Inject a wrong zero pattern; the pattern check must then fail
    #[arg(long)]
    pub canary: bool,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// Contents of a `--config` file. Every key is optional; flags win.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub scheme: Option<Scheme>,
    pub region: Option<RegionKind>,
    #[serde(alias = "A")]
    pub a: Option<Vec1>,
    #[serde(alias = "B")]
    pub b: Option<Vec1>,
    #[serde(alias = "K")]
    pub k: Option<usize>,
    #[serde(alias = "M")]
    pub m: Option<usize>,
    #[serde(alias = "N")]
    pub n: Option<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub coherence: Option<u64>,
    pub feedback_delay: Option<u64>,
    pub threads: Option<usize>,
    pub grid: Option<String>,
    pub steps: Option<u32>,
    pub scale: Option<u64>,
    pub suites: Option<Vec<String>>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
}

/// A single count or a list of counts (the table command takes lists).
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Vec1 {
    One(usize),
    Many(Vec<usize>),
}

impl Vec1 {
    pub fn first(&self) -> Option<usize> {
        match self {
            Vec1::One(x) => Some(*x),
            Vec1::Many(v) => v.first().copied(),
        }
    }

    pub fn all(&self) -> Vec<usize> {
        match self {
            Vec1::One(x) => vec![*x],
            Vec1::Many(v) => v.clone(),
        }
    }
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }

    /// Fills unset dimensions from the file.
    pub fn fill_dims(&self, dims: &Dims) -> Dims {
        Dims {
            a: dims.a.or(self.a.as_ref().and_then(Vec1::first)),
            b: dims.b.or(self.b.as_ref().and_then(Vec1::first)),
            k: dims.k.or(self.k),
            m: dims.m.or(self.m),
            n: dims.n.or(self.n),
        }
    }
}

/// Flag, then config file, then `$XDOF_SEED`, then the built-in default.
pub fn resolve_seed(flag: Option<u64>, file: &FileConfig) -> Result<u64, CliError> {
    if let Some(s) = flag.or(file.seed) {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("${SEED_ENV} must be an unsigned integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

pub fn need(value: Option<usize>, flag: &str) -> Result<usize, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("missing --{flag}")))
}
