//! `qleak`: maximal quantum leakage experiments from the command line.
//!
//! Exit codes: 0 ok, 1 invalid configuration, 2 input violates an invariant,
//! 3 solver did not converge, 4 a corrected accuracy bound was violated.

mod commands;
mod config;

use std::fmt;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{LeakageArgs, OptimizeArgs, SweepArgs, VerifyArgs};

#[derive(Parser, Debug)]
#[command(name = "qleak", version, about = "Maximal quantum leakage and optimal universal encoders")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Maximal quantum leakage of one ensemble, as JSON.
    Leakage(LeakageArgs),
    /// Projected subgradient ascent from random encodings; writes trace CSVs.
    Optimize(OptimizeArgs),
    /// Best leakage versus number of qubits, as CSV.
    Sweep(SweepArgs),
    /// Audit accuracy bounds on random inference pipelines, as CSV.
    Verify(VerifyArgs),
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Input(String),
    NonConvergence(String),
    BoundViolation(usize),
    Io(String),
    Compute(qleak_core::Error),
}

impl From<qleak_core::Error> for CliError {
    fn from(e: qleak_core::Error) -> Self {
        if e.is_input_violation() {
            CliError::Input(e.to_string())
        } else {
            CliError::Compute(e)
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) | CliError::Compute(_) => 1,
            CliError::Input(_) => 2,
            CliError::NonConvergence(_) => 3,
            CliError::BoundViolation(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid configuration: {m}"),
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::NonConvergence(m) => write!(f, "no convergence: {m}"),
            CliError::BoundViolation(n) => write!(f, "corrected bound violated in {n} case(s)"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Compute(e) => write!(f, "{e}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Leakage(a) => commands::leakage(a),
        Command::Optimize(a) => commands::optimize(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Verify(a) => commands::verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qleak: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
