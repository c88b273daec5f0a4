use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;

use config::ModelArgs;

/// Error carrying the process exit code: 2 configuration, 3 solver, 4 failed verification.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    pub fn verify(message: impl Into<String>) -> Self {
        Failure {
            code: 4,
            message: message.into(),
        }
    }
}

fn core_code(e: &bethe_core::Error) -> u8 {
    use bethe_core::Error::*;
    match e {
        Domain(_) | InvalidNumbers(_) | DimensionTooLarge { .. } | InsufficientPoints { .. } => 2,
        Scan { source, .. } => core_code(source),
        _ => 3,
    }
}

impl From<bethe_core::Error> for Failure {
    fn from(e: bethe_core::Error) -> Self {
        Failure {
            code: core_code(&e),
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: 1,
            message: format!("i/o error: {e}"),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure {
            code: 1,
            message: format!("serialization error: {e}"),
        }
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure {
            code: 1,
            message: format!("csv error: {e}"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "bethe", version, about = "Bethe ansatz numerics for the twisted XXZ chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one Bethe state and report observables next to the predictions.
    Solve(SolveArgs),
    /// Solve a state template over several lengths and fit the 1/L² amplitude.
    Scan(ScanArgs),
    /// Exact diagonalization of one magnetization sector.
    Ed(EdArgs),
    /// Table of p_m(k), partitions of k into parts ≤ m.
    Char(CharArgs),
    /// Test-function and degeneracy checks; exits 4 if any fails.
    Verify(VerifyArgs),
    /// Closed-form predictions without solving.
    Predict(PredictArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Also evaluate the transfer-matrix eigenvalue at this spectral parameter.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    /// Write the JSON record here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Doubling sequence START:STOP, used when --L is not given.
    #[arg(long)]
    doubling: Option<String>,
    /// Solve every length from the thermodynamic guess, in parallel.
    #[arg(long)]
    cold: bool,
    /// Emit only the analytic columns.
    #[arg(long)]
    predict_only: bool,
    /// CSV destination (default stdout).
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Fit JSON destination (default stderr).
    #[arg(long)]
    fit: Option<PathBuf>,
    /// Two-column file of L and the amplitude a_L.
    #[arg(long)]
    plot_data: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EdArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Number of down spins (default L/2).
    #[arg(long = "M")]
    num_down: Option<usize>,
    /// Solve the selected Bethe state and match its energy against the spectrum.
    #[arg(long = "match")]
    match_state: bool,
    #[arg(long, default_value_t = 1e-10)]
    match_tol: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CharArgs {
    #[arg(long)]
    m: u32,
    #[arg(long, default_value_t = 10)]
    kmax: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Run every check.
    #[arg(long)]
    all: bool,
    /// Gaussian test-function check on the ground state.
    #[arg(long)]
    wl: bool,
    /// Descendant counts against p_m(k).
    #[arg(long)]
    degeneracy: bool,
    #[arg(long = "L", default_value_t = 1024)]
    length: usize,
    #[arg(long, default_value = "0.55pi")]
    gamma: String,
    #[arg(long, default_value_t = 0.05)]
    wl_tol: f64,
    #[arg(long, default_value = "pi/5")]
    char_gamma: String,
    #[arg(long = "char-L", default_value_t = 64)]
    char_length: usize,
    #[arg(long, default_value_t = 1)]
    n_plus: u32,
    #[arg(long, default_value_t = 1)]
    n_minus: u32,
    #[arg(long, default_value_t = 5)]
    kmax: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => commands::solve(&a),
        Command::Scan(a) => commands::scan(&a),
        Command::Ed(a) => commands::ed(&a),
        Command::Char(a) => commands::character(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Predict(a) => commands::predict(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
