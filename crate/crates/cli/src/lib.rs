//! Command-line front end for `bohrdisc-core`.

use std::fmt;
use std::path::PathBuf;

use bohrdisc_core::discord::OptimizerConfig;
use clap::{Args, Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod files;

/// Exit status for a run that completed with a positive verdict.
pub const EXIT_OK: i32 = 0;
/// Exit status for a negative verdict (disturbing, infeasible, signalling).
pub const EXIT_NEGATIVE: i32 = 1;
/// Exit status for invalid input or any other error.
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug)]
pub enum CliError {
    Io {
        path: PathBuf,
        message: String,
    },
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    Usage(String),
    Core(bohrdisc_core::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io { path, message } => write!(f, "{}: {message}", path.display()),
            CliError::Parse {
                path,
                line: 0,
                message,
                ..
            } => write!(f, "{}: {message}", path.display()),
            CliError::Parse {
                path,
                line,
                column,
                message,
            } => write!(f, "{}:{line}:{column}: {message}", path.display()),
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<bohrdisc_core::Error> for CliError {
    fn from(e: bohrdisc_core::Error) -> Self {
        CliError::Core(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    #[value(alias = "structured")]
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Side {
    Alice,
    Bob,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NotionArg {
    Epr,
    Bohr,
}

#[derive(Debug, Parser)]
#[command(
    name = "bohrdisc",
    version,
    about = "Quantum discord, EPR and Bohr disturbance, and nonlocality checks"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Seed for the optimizer and random dictionaries
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Normalization tolerance for frequency tables read from files
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Number of optimizer starts for discord minimization
    #[arg(long, global = true)]
    pub starts: Option<usize>,
    /// Iteration cap for each local descent
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
    /// Gradient-norm stopping tolerance for each local descent
    #[arg(long, global = true)]
    pub opt_tol: Option<f64>,
    /// Output format
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// JSON file with defaults for the flags above
    #[arg(long, global = true, env = "BOHRDISC_CONFIG")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mutual information, classical correlation and discord of a state
    Discord {
        /// State file
        state: PathBuf,
        /// Party that is measured
        #[arg(long, value_enum, default_value = "alice")]
        side: Side,
    },
    /// Place a state in the Bell-nonlocal, steerable, entangled, discordant, dissonant chain
    Classify {
        /// State file
        state: PathBuf,
        /// Alice measurements used for the steering test
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=3))]
        settings: u8,
    },
    /// Run the EPR argument on the maximally entangled state of two d-level systems
    EprDemo {
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u16).range(2..=16))]
        dim: u16,
        #[arg(long, value_enum, default_value = "epr")]
        notion: NotionArg,
    },
    /// Test whether an instrument disturbs in Bohr's sense
    BohrCheck {
        /// State file
        state: PathBuf,
        /// Alice's first instrument
        instrument: PathBuf,
        /// Quantities whose direct statistics must be recovered
        #[arg(required = true)]
        catalog: Vec<PathBuf>,
        /// Bob's measurements (default: Pauli operators for a qubit, else computational and Fourier bases)
        #[arg(long)]
        bob: Vec<PathBuf>,
        /// Follow-up measurements to search (default: catalog, instrument and qubit Pauli catalog)
        #[arg(long)]
        recovery: Vec<PathBuf>,
    },
    /// Checks on raw frequency tables
    Phenomenon {
        #[command(subcommand)]
        action: PhenomenonAction,
    },
    /// Search for a local hidden-variable model reproducing a table file
    LocalModel {
        /// Frequency-table file
        phenomenon: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum PhenomenonAction {
    /// No-signalling in both directions and predictability of every pair
    Check {
        /// Frequency-table file
        phenomenon: PathBuf,
    },
}

/// Resolved global settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub seed: u64,
    pub tol: f64,
    pub starts: usize,
    pub max_iterations: usize,
    pub opt_tol: f64,
    pub format: Format,
}

impl Settings {
    pub fn optimizer(&self) -> OptimizerConfig {
        OptimizerConfig {
            seed: self.seed,
            starts: self.starts,
            max_iterations: self.max_iterations,
            tolerance: self.opt_tol,
            ..OptimizerConfig::default()
        }
    }

    pub fn resolve(g: &GlobalArgs) -> Result<Self, CliError> {
        let cfg = match &g.config {
            Some(p) => files::load_config(p)?,
            None => files::ConfigFile::default(),
        };
        let format = match (g.format, cfg.format.as_deref()) {
            (Some(f), _) => f,
            (None, Some(s)) => Format::from_str(s, true)
                .map_err(|_| CliError::Usage(format!("unknown format `{s}` in config")))?,
            (None, None) => Format::Text,
        };
        let defaults = OptimizerConfig::default();
        let s = Settings {
            seed: g.seed.or(cfg.seed).unwrap_or(0),
            tol: g.tol.or(cfg.tol).unwrap_or(1e-9),
            starts: g.starts.or(cfg.starts).unwrap_or(defaults.starts),
            max_iterations: g
                .max_iter
                .or(cfg.max_iterations)
                .unwrap_or(defaults.max_iterations),
            opt_tol: g.opt_tol.or(cfg.opt_tol).unwrap_or(defaults.tolerance),
            format,
        };
        for (name, t) in [("tolerance", s.tol), ("optimizer tolerance", s.opt_tol)] {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::Usage(format!("{name} must be positive, got {t}")));
            }
        }
        if s.starts == 0 || s.max_iterations == 0 {
            return Err(CliError::Usage(
                "optimizer starts and iterations must be positive".into(),
            ));
        }
        Ok(s)
    }
}

/// Result of a command: text and structured renderings plus the verdict polarity.
#[derive(Debug, Clone)]
pub struct Output {
    pub text: String,
    pub json: serde_json::Value,
    pub negative: bool,
}

impl Output {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Json => {
                serde_json::to_string_pretty(&self.json).expect("values serialize") + "\n"
            }
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.negative {
            EXIT_NEGATIVE
        } else {
            EXIT_OK
        }
    }
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<(Settings, Output), CliError> {
    let settings = Settings::resolve(&cli.global)?;
    files::set_table_tolerance(settings.tol);
    let out = commands::dispatch(&cli.command, &settings)?;
    Ok((settings, out))
}
