//! Per-command settings. Each command reads an optional JSON config file,
//! then applies command-line flags on top; anything still unset takes its
//! default. Unknown keys in the file are rejected.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::CliError;

/// Flags shared by every command.
#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// Master seed for every random choice.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path (file or directory, depending on the command).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON config file; flags given on the command line take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Relative objective change at which the leakage solver stops.
    #[arg(long)]
    pub tol: Option<f64>,
}

pub fn load_file<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, CliError> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
}

#[derive(Args, Debug, Clone)]
pub struct LeakageArgs {
    /// `basis`, `random`, or the path of an ensemble JSON file.
    #[arg(long)]
    pub ensemble: Option<String>,
    #[arg(long)]
    pub alphabet: Option<usize>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Number of POVM outcomes (default dim²).
    #[arg(long)]
    pub outcomes: Option<usize>,
    /// Write the objective trace of the winning restart as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
pub struct LeakageFile {
    pub ensemble: Option<String>,
    pub alphabet: Option<usize>,
    pub dim: Option<usize>,
    pub max_iter: Option<usize>,
    pub restarts: Option<usize>,
    pub outcomes: Option<usize>,
    pub trace: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub alphabet: Option<usize>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Ascent step size.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Outer ascent iterations.
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Iteration cap of the inner leakage solver.
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
pub struct OptimizeFile {
    pub alphabet: Option<usize>,
    pub dim: Option<usize>,
    pub mu: Option<f64>,
    pub iters: Option<usize>,
    pub restarts: Option<usize>,
    pub max_iter: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[arg(long)]
    pub alphabet: Option<usize>,
    /// Inclusive qubit range `lo:hi` (or a single count).
    #[arg(long)]
    pub qubits: Option<String>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub alphabet: Option<usize>,
    pub qubits: Option<String>,
    pub mu: Option<f64>,
    pub iters: Option<usize>,
    pub restarts: Option<usize>,
    pub max_iter: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// Number of random pipelines to audit.
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub dim_max: Option<usize>,
    #[arg(long)]
    pub alphabet_max: Option<usize>,
    #[arg(long)]
    pub outcome_max: Option<usize>,
    /// Audit only the 8-symbol perfect-discrimination pipeline.
    #[arg(long)]
    pub counterexample: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
pub struct VerifyFile {
    pub trials: Option<usize>,
    pub dim_max: Option<usize>,
    pub alphabet_max: Option<usize>,
    pub outcome_max: Option<usize>,
    pub counterexample: Option<bool>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
}

/// `"lo:hi"` or `"n"`.
pub fn parse_qubits(s: &str) -> Result<(u32, u32), CliError> {
    let bad = || CliError::Config(format!("qubit range must look like 1:4, got {s:?}"));
    let (lo, hi) = match s.split_once(':') {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let n = s.trim().parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}
