//! Command-line front end: `qwm <map|shift-scan|spectrum|validate|rabi-fit>`.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod validate;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::RunConfig;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "qwm", version, about = "Quantum wave mixing maps, scans, spectra and Rabi fits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration (optional for validate).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory receiving every output file.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    /// Worker threads for grid sweeps; all cores when absent.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Restrict validate to the symbolic checks.
    #[arg(long, global = true)]
    pub quick: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Component maps over the rotation angles (θ₋, θ₊).
    Map,
    /// Comb components while one pulse slides through the train.
    ShiftScan,
    /// Comb components of a single pulse sequence.
    Spectrum,
    /// Golden-data self check; writes validate_report.json.
    Validate,
    /// Fit (Ω, Γ₁) to a damped Rabi trace.
    RabiFit,
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    match &cli.config {
        Some(path) => RunConfig::load(path),
        None => Err(CliError::Config("--config is required for this command".into())),
    }
}

/// Runs one command. Worker-pool setup is left to the caller.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let out = &cli.out_dir;
    match cli.command {
        Command::Validate => commands::cmd_validate(out, cli.quick),
        Command::Map => commands::cmd_map(&load_config(cli)?, out).map(|_| ()),
        Command::ShiftScan => commands::cmd_shift_scan(&load_config(cli)?, out).map(|_| ()),
        Command::Spectrum => commands::cmd_spectrum(&load_config(cli)?, out).map(|_| ()),
        Command::RabiFit => commands::cmd_rabi_fit(&load_config(cli)?, out),
    }
}
