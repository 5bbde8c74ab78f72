//! `fspde` command-line tool.
//!
//! Exit codes: 0 success, 1 computational or check failure, 2 usage error.

mod commands;
mod manifest;
mod settings;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fspde::experiments::Axis;
use fspde::fbm::{FbmMethod, HurstParameter};
use fspde::presets::Preset;

use settings::List;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failure(String),
    /// Checks ran but some did not pass; the summary is already printed.
    #[error("{} check(s) failed: {}", .0.len(), .0.join(", "))]
    Checks(Vec<String>),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) | CliError::Checks(_) => 1,
        }
    }
}

impl From<fspde::Error> for CliError {
    fn from(e: fspde::Error) -> Self {
        match e {
            fspde::Error::Domain(_) => CliError::Usage(e.to_string()),
            other => CliError::Failure(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "fspde", version, about = "Spectral Galerkin / implicit Euler solver for SPDEs driven by fractional noise")]
pub struct Cli {
    /// Directory for all output files.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,

    /// Flat `key = value` file; keys are long flag names.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Monte Carlo worker threads (0 = all cores, 1 = sequential).
    /// Defaults to $FSPDE_WORKERS, else 0.
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample cylindrical fBm increments.
    GenFbm(GenFbmArgs),
    /// Solve one path of a preset problem.
    Solve(SolveArgs),
    /// Run a temporal or spatial convergence study.
    Converge(ConvergeArgs),
    /// Run verification suites; exit 1 if any check fails.
    Verify(VerifyArgs),
    /// Monte Carlo isometry check for the discrete stochastic convolution.
    IsometryCheck(IsometryArgs),
    /// Hölder and Sobolev regularity probes.
    RegularityCheck(RegularityArgs),
}

#[derive(Debug, Args)]
pub struct GenFbmArgs {
    #[arg(long)]
    pub hurst: Option<HurstParameter>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Step size; defaults to 1 / steps.
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub modes: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// cholesky or circulant
    #[arg(long)]
    pub method: Option<FbmMethod>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// she-identity or she-trace
    #[arg(long)]
    pub preset: Option<Preset>,
    #[arg(long)]
    pub hurst: Option<HurstParameter>,
    #[arg(long)]
    pub modes: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub method: Option<FbmMethod>,
    /// `preset` or `zero`
    #[arg(long)]
    pub noise: Option<commands::NoiseChoice>,
    /// `sin` or `zero`
    #[arg(long)]
    pub nonlinearity: Option<commands::DriftChoice>,
    /// Also write every iterate.
    #[arg(long)]
    pub trajectory: bool,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    /// space or time
    #[arg(long)]
    pub axis: Option<Axis>,
    #[arg(long)]
    pub preset: Option<Preset>,
    /// Full-size protocol instead of the desk defaults.
    #[arg(long)]
    pub paper_scale: bool,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// isometry, phi, lambda-phi, regularity or all
    #[arg(long)]
    pub suite: Option<verify::Suite>,
    /// Monte Carlo samples (isometry default 10000, regularity default 50).
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct IsometryArgs {
    #[arg(long)]
    pub preset: Option<Preset>,
    #[arg(long)]
    pub modes: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub method: Option<FbmMethod>,
}

#[derive(Debug, Args)]
pub struct RegularityArgs {
    #[arg(long)]
    pub preset: Option<Preset>,
    #[arg(long)]
    pub modes: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Step lags for the Hölder fit, e.g. `8,16,32,64,128`.
    #[arg(long)]
    pub lags: Option<List<usize>>,
    /// Sobolev index of the Hölder fit.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Mode ladder for the Sobolev probe.
    #[arg(long)]
    pub ladder: Option<List<usize>>,
    /// Sobolev indices to probe; defaults to threshold -/+ 0.1.
    #[arg(long)]
    pub deltas: Option<List<f64>>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
