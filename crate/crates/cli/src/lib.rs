//! The `geomean` command line: argument model, commands and reports.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
//! 3 numerical failure.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use geomean_core::QuadratureOptions;

pub mod commands;
pub mod config;
pub mod report;

use config::{CommonArgs, OutputFormat, RunConfig, DEFAULT_SAMPLES, DEFAULT_TOLERANCE};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFICATION: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

/// Quadrature trouble and derivative sampling problems are numerical;
/// everything else is bad input.
pub fn core_error(e: geomean_core::Error) -> CliError {
    use geomean_core::Error as E;
    match e {
        E::Quadrature(_) | E::StencilOutOfDomain { .. } | E::NonPositiveFunction { .. } => CliError::Numerical(e.to_string()),
        _ => CliError::Usage(e.to_string()),
    }
}

/// What a command produced: the body for stdout or `--out`, notes for
/// stderr and the exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub body: String,
    pub diagnostics: Vec<String>,
    pub exit_code: u8,
}

impl Output {
    pub fn new(body: String) -> Self {
        Self {
            body,
            diagnostics: Vec::new(),
            exit_code: EXIT_OK,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "geomean", version, about = "Shifted geometric means through their integral representation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Arithmetic and geometric means, representation vs direct formula, AG gap.
    Eval(CommonArgs),
    /// Derivative sign pattern and representation/direct agreement; exit 1 on failure.
    Verify(CommonArgs),
    /// Sample the representation density over [min a, max a] as CSV.
    Density(CommonArgs),
    /// Stolarsky's extended mean E(r, s; x, y).
    Stolarsky(StolarskyArgs),
    /// Sample both forms of the bivariate kernel rho(s) as CSV.
    Rho(RhoArgs),
    /// Bivariate representation of sqrt((x + t)(y + t)) against the closed form.
    Bivariate(BivariateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct StolarskyArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub r: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub s: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub x: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub y: f64,
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RhoArgs {
    #[arg(long, default_value_t = 1e-3)]
    pub s_min: f64,
    #[arg(long, default_value_t = 50.0)]
    pub s_max: f64,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    #[arg(long, env = "MEANS_TOL", default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BivariateArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub x: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub y: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub t: f64,
    #[arg(long, env = "MEANS_TOL", default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn checked_options(tol: f64) -> Result<QuadratureOptions, CliError> {
    let opts = QuadratureOptions::with_tolerance(tol);
    opts.validate().map_err(|e| CliError::Usage(format!("--tol: {e}")))?;
    Ok(opts)
}

/// Runs a parsed command; returns the output and where it should go.
pub fn run(command: Command) -> Result<(Output, Option<PathBuf>), CliError> {
    match command {
        Command::Eval(args) => {
            let cfg = RunConfig::from_args(args, OutputFormat::Text)?;
            Ok((commands::eval(&cfg)?, cfg.output_path))
        }
        Command::Verify(args) => {
            let cfg = RunConfig::from_args(args, OutputFormat::Text)?;
            Ok((commands::verify(&cfg)?, cfg.output_path))
        }
        Command::Density(args) => {
            let cfg = RunConfig::from_args(args, OutputFormat::Csv)?;
            Ok((commands::density(&cfg)?, cfg.output_path))
        }
        Command::Stolarsky(a) => Ok((commands::stolarsky(a.r, a.s, a.x, a.y, a.json)?, a.out)),
        Command::Rho(a) => {
            let opts = checked_options(a.tol)?;
            Ok((commands::rho_table(a.s_min, a.s_max, a.samples, &opts)?, a.out))
        }
        Command::Bivariate(a) => {
            let opts = checked_options(a.tol)?;
            Ok((commands::bivariate(a.x, a.y, a.t, a.json, &opts)?, a.out))
        }
    }
}
