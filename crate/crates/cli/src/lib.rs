//! Batch front end for the passive ultrasonic link simulator.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

mod commands;
pub mod config;
pub mod output;
pub mod units;

pub use commands::FIGURES;
use config::{Format, ScenarioConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("model error: {0}")]
    Model(#[from] puc_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Input(_) => 2,
            Self::Io(_) | Self::Model(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "puc", version, about = "Passive ultrasonic link simulator")]
pub struct Cli {
    /// Scenario document (JSON). Defaults apply when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Overrides `noise.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides `output.format` for tables.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// BVD and transmission-line impedance spectra per load.
    Impedance,
    /// Frequency sweep spectrum and valley per load.
    Sweep,
    /// One pulse-echo trace, its lock-in envelope and the filter design.
    Echo,
    /// Fit a valley-frequency calibration over the configured loads.
    Calibrate,
    /// Replay a pressure trace through the streaming estimator.
    Estimate {
        /// CSV with header `time_s,pressure_kpa`.
        pressure: PathBuf,
        /// Calibration JSON written by `calibrate`; fitted afresh when absent.
        #[arg(long)]
        calibration: Option<PathBuf>,
    },
    /// Regenerate the data behind one figure.
    Reproduce {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(FIGURES))]
        figure: String,
        /// Repetitions for the statistics figures.
        #[arg(long)]
        repeats: Option<usize>,
    },
}

/// Load the scenario and apply command-line overrides.
pub fn load_config(cli: &Cli) -> Result<ScenarioConfig, CliError> {
    let mut cfg = match &cli.config {
        None => ScenarioConfig::default(),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            ScenarioConfig::parse(&text).map_err(|e| match e {
                CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
                other => other,
            })?
        }
    };
    if let Some(seed) = cli.seed {
        cfg.noise.seed = Some(seed);
    }
    if let Some(format) = cli.format {
        cfg.output.format = format;
    }
    Ok(cfg)
}

/// Run one invocation; returns the files written.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let cfg = load_config(cli)?;
    commands::dispatch(cli, &cfg)
}
