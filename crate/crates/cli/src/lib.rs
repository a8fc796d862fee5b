//! Command-line front end: bound surfaces and curves as CSV, oracle and
//! physicality reports as JSON.
//!
//! Exit codes: 0 success, 2 usage or input schema error, 3 numerical
//! failure, 4 oracle mismatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wigner_bounds::phase_core::Numerics;
use wigner_bounds::Branch;

mod commands;
pub mod input;
pub mod output;

pub use commands::{check_report, surface_csv, ultimate_csv, verify_report};

/// Environment variable overriding the relative quadrature tolerance.
pub const TOL_ENV: &str = "WIGNER_BOUNDS_TOL";

/// Largest oracle relative error accepted by `verify`.
pub const ORACLE_TOL: f64 = 1e-6;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("oracle mismatch: max relative error {max_rel_err:e} exceeds {tolerance:e}")]
    OracleMismatch { max_rel_err: f64, tolerance: f64 },
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::OracleMismatch { .. } => 4,
        }
    }
}

impl From<wigner_bounds::Error> for CliError {
    fn from(e: wigner_bounds::Error) -> Self {
        use wigner_bounds::Error as E;
        match e {
            E::ParamOutOfRange { .. } | E::InvalidInput(_) | E::NormalizationViolation { .. } => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Numerical(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "wigner-bounds",
    version,
    about = "Non-Gaussianity bounds for states with positive Wigner functions"
)]
pub struct Cli {
    /// Recorded in output metadata; no command uses randomness.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the extremal upper-bound surface on a μ_G grid.
    Surface(SurfaceArgs),
    /// Ultimate upper bound (and optionally the coherent-mixture lower estimate).
    Ultimate(UltimateArgs),
    /// Check a Wigner function from a JSON file.
    Check(CheckArgs),
    /// Compare a numerically constructed extremal function with the closed forms.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SurfaceArgs {
    #[arg(long, default_value_t = 0.05)]
    pub mu_g_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mu_g_max: f64,
    #[arg(long, default_value_t = 20)]
    pub mu_g_steps: usize,
    #[arg(long, default_value_t = 50)]
    pub params_per_branch: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct UltimateArgs {
    /// Grid `μ_G = i/N` for `i = 1..=N`.
    #[arg(long, default_value_t = 50)]
    pub mu_g_steps: usize,
    /// Add the coherent-mixture lower estimate column.
    #[arg(long)]
    pub with_lower: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = wigner_bounds::physicality::DEFAULT_N_MAX)]
    pub max_n: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    #[value(name = "two_root", alias = "two-root")]
    TwoRoot,
    #[value(name = "one_root", alias = "one-root")]
    OneRoot,
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::TwoRoot => Branch::TwoRoot,
            BranchArg::OneRoot => Branch::OneRoot,
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub branch: BranchArg,
    #[arg(long)]
    pub mu_g: f64,
    #[arg(long)]
    pub param: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Settings shared by every command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub numerics: Numerics,
    pub seed: Option<u64>,
}

impl Settings {
    /// Defaults, with the tolerance taken from `WIGNER_BOUNDS_TOL` when set.
    pub fn from_env(seed: Option<u64>) -> Result<Self, CliError> {
        let tol = std::env::var(TOL_ENV).ok();
        Self::with_tolerance(tol.as_deref(), seed)
    }

    pub fn with_tolerance(tol: Option<&str>, seed: Option<u64>) -> Result<Self, CliError> {
        let mut numerics = Numerics::default();
        if let Some(raw) = tol {
            let v: f64 = raw
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{TOL_ENV}: not a number: {raw:?}")))?;
            if !(v > 0.0 && v < 1.0) {
                return Err(CliError::Usage(format!("{TOL_ENV}: must lie in (0, 1), got {v}")));
            }
            numerics.rel_tol = v;
        }
        Ok(Self { numerics, seed })
    }
}

/// Runs one command and writes its output.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let settings = Settings::from_env(cli.seed)?;
    match &cli.command {
        Command::Surface(a) => {
            let csv = surface_csv(a, &settings)?;
            output::emit(a.out.as_deref(), &csv)
        }
        Command::Ultimate(a) => {
            let csv = ultimate_csv(a, &settings)?;
            output::emit(a.out.as_deref(), &csv)
        }
        Command::Check(a) => {
            let text =
                std::fs::read_to_string(&a.input).map_err(|e| CliError::Io(format!("{}: {e}", a.input.display())))?;
            let report = check_report(&text, a.max_n, &settings)?;
            output::emit(a.out.as_deref(), &pretty(&report))
        }
        Command::Verify(a) => {
            let (report, max_rel_err) = verify_report(a, &settings)?;
            output::emit(a.out.as_deref(), &pretty(&report))?;
            if max_rel_err.is_nan() || max_rel_err > ORACLE_TOL {
                return Err(CliError::OracleMismatch {
                    max_rel_err,
                    tolerance: ORACLE_TOL,
                });
            }
            Ok(())
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run_args<I, T>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    run(&cli)
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}
