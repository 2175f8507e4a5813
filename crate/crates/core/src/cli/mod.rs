//! The `nullfront` command: configuration, the batch pipeline and export.

pub mod config;
pub mod export;
pub mod pipeline;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use config::{ConfigFile, JobConfig, Mode, Overrides};
pub use pipeline::{execute, Outcome, Report, SCHEMA_VERSION};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("unknown generator '{0}' (known: {known})", known = crate::builtins::NAMES.join(", "))]
    UnknownGenerator(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid t-window [{0}, {1}]: need finite a < b")]
    Window(f64, f64),
    #[error("cannot write {0}: {1}")]
    Io(String, String),
    #[error("computation failed: {0}")]
    Computation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::UnknownGenerator(_) => exit::UNKNOWN_GENERATOR,
            CliError::Config(_) | CliError::Window(..) => exit::INVALID_CONFIG,
            CliError::Io(..) => exit::IO,
            CliError::Computation(_) => exit::COMPUTATION,
        }
    }
}

pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const UNKNOWN_GENERATOR: i32 = 3;
    pub const INVALID_CONFIG: i32 = 4;
    pub const IO: i32 = 5;
    pub const COMPUTATION: i32 = 6;
}

#[derive(Debug, Parser)]
#[command(name = "nullfront", version, about = "Null wave fronts in Lorentz-Minkowski space")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a front from a built-in generator and run the requested analysis.
    Run(RunArgs),
}

#[derive(Debug, Args)]
#[command(after_help = "Defaults: grid 512 nodes (curves) or 64x64 (surfaces), 64 rulings, \
t-window -1,1, sigma +, mode analyze, seed 0, 200 reconstruction samples, 3 glue patches, \
pos_tol 3x the coarser patch spacing, nu_tol 1e-6, 5 neighbours, transversality angle 1e-3 rad.")]
pub struct RunArgs {
    /// Built-in generator name.
    #[arg(long, value_name = "NAME")]
    pub example: Option<String>,
    /// TOML job file; command-line flags override it.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Time orientation of the null normal: + or -.
    #[arg(long, value_name = "+|-", allow_hyphen_values = true)]
    pub sigma: Option<String>,
    /// Ruling window `a,b`.
    #[arg(long, value_name = "A,B", allow_hyphen_values = true)]
    pub t_window: Option<String>,
    /// Generator nodes per axis, optionally followed by the ruling count.
    #[arg(long, value_name = "N[,M]")]
    pub grid: Option<String>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// OBJ mesh of the front (curve generators).
    #[arg(long, value_name = "PATH")]
    pub mesh: Option<PathBuf>,
    /// Singular-locus CSV.
    #[arg(long, value_name = "PATH")]
    pub locus: Option<PathBuf>,
    /// JSON report; printed to stdout when absent.
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
    /// Slice polylines CSV.
    #[arg(long, value_name = "PATH")]
    pub slices: Option<PathBuf>,
    /// Seed for randomised sampling.
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// Write mesh vertices as (t, x, y) instead of (x, y, t).
    #[arg(long)]
    pub raw_axes: bool,
}

impl RunArgs {
    pub fn job(self) -> Result<JobConfig, CliError> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
                ConfigFile::parse(&text)?
            }
            None => ConfigFile::default(),
        };
        let overrides = Overrides {
            example: self.example,
            sigma: self.sigma,
            t_window: self.t_window,
            grid: self.grid,
            mode: self.mode,
            seed: self.seed,
            mesh: self.mesh,
            locus: self.locus,
            report: self.report,
            slices: self.slices,
            raw_axes: self.raw_axes,
        };
        JobConfig::resolve(file, overrides)
    }
}

/// Parses `args`, runs the job and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return code;
        }
    };
    let Command::Run(args) = cli.command;
    match args.job().and_then(|job| execute(&job)) {
        Ok(outcome) => {
            if let Some(text) = outcome.stdout {
                print!("{text}");
            }
            eprintln!("{}", outcome.summary);
            exit::OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
