//! `dimer`: steady-state entanglement of a driven atom pair from the command
//! line. See [`Command`] for the subcommands.

use std::ffi::OsString;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use dimer_core::DecayScale;
use thiserror::Error;

mod commands;
pub mod config;
pub mod point;
pub mod sweep;
pub mod table;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failure(String),
    #[error("{0} of {1} checks failed")]
    ChecksFailed(usize, usize),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}' (expected text|csv|json)")),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "dimer", version, about = "Steady-state entanglement of two driven, dipole-coupled atoms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Steady state, its spectrum and entanglement at one parameter point.
    #[command(allow_negative_numbers = true)]
    Steady {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Eigenvalues of the Hamiltonian and of the effective non-Hermitian Hamiltonian.
    #[command(allow_negative_numbers = true)]
    Spectrum {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Interatomic distance giving a target τ versus photon number.
    #[command(allow_negative_numbers = true)]
    Fig1(Fig1Args),
    /// Concurrence over a (k0r, E) grid from the full numeric pipeline.
    #[command(allow_negative_numbers = true)]
    Fig2(Fig2Args),
    /// Steady-state results over one or two parameter axes.
    #[command(allow_negative_numbers = true)]
    Sweep(SweepArgs),
    /// Run the self-check suite.
    Check {
        #[command(flatten)]
        common: CommonArgs,
    },
}

/// Physical parameters; rates are in units of the single-atom decay rate.
#[derive(Debug, Clone, Default, Args)]
pub struct PointArgs {
    /// Detuning Δ/Γ.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Drive strength E/Γ (≥ 0).
    #[arg(long)]
    pub efield: Option<f64>,
    /// Dipole coupling Ω/Γ, given directly.
    #[arg(long)]
    pub omega: Option<f64>,
    /// Cross-decay rate Γ12/Γ with --omega or --tau (default 1).
    #[arg(long)]
    pub gamma12: Option<f64>,
    /// Interatomic distance k0·r; Ω and Γ12 follow from the geometry.
    #[arg(long)]
    pub k0r: Option<f64>,
    /// |μ̂·r̂| for --k0r (default 0).
    #[arg(long)]
    pub mu_dot_rhat: Option<f64>,
    /// τ = Ω/E²; with --lamb-dicke and no --efield, the strong-drive limit.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Point-like limit: Γ12 = Γ, Δ = 0, analytic steady state.
    #[arg(long)]
    pub lamb_dicke: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Output format: text, csv or json.
    #[arg(long)]
    pub format: Option<Format>,
    /// Write output to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key = value parameter file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Decay normalization: half (default) or unit.
    #[arg(long)]
    pub decay_scale: Option<DecayScale>,
}

#[derive(Debug, Clone, Args)]
pub struct Fig1Args {
    /// Atomic quality factor Q (default 1e6).
    #[arg(long)]
    pub q: Option<f64>,
    /// Target τ (default 2 + 2√13).
    #[arg(long)]
    pub tau: Option<f64>,
    /// Smallest photon number n̄V (default 1).
    #[arg(long)]
    pub nbar_min: Option<f64>,
    /// Largest photon number n̄V (default 1e6).
    #[arg(long)]
    pub nbar_max: Option<f64>,
    /// Number of logarithmically spaced points (default 61).
    #[arg(long)]
    pub points: Option<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct Fig2Args {
    /// k0r range as start:stop, logarithmically spaced (default 0.01:1).
    #[arg(long)]
    pub k0r_range: Option<String>,
    /// E/Γ range as start:stop, linearly spaced (default 0:10).
    #[arg(long)]
    pub efield_range: Option<String>,
    /// Points per axis (default 21).
    #[arg(long)]
    pub points: Option<usize>,
    /// Detuning Δ/Γ (default 0).
    #[arg(long)]
    pub delta: Option<f64>,
    /// |μ̂·r̂| (default 0).
    #[arg(long)]
    pub mu_dot_rhat: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Axis as name=start:stop:count[:log]; names are k0r, efield (or drive),
    /// omega, delta, tau. Give one or two.
    #[arg(long = "axis", required = false)]
    pub axes: Vec<String>,
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match commands::dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            if !matches!(e, CliError::ChecksFailed(..)) {
                eprintln!("error: {e}");
            }
            e.exit_code()
        }
    }
}
