//! Command-line front end: configuration, subcommands and file output.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod svg;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::commands::{ScenarioName, Session};
use crate::config::{Config, Context};
use crate::error::CliError;
use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "minecast",
    version,
    about = "Bitcoin mining electricity and CO2 projections"
)]
pub struct Cli {
    /// Scenario config (JSON); the built-in base case when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Output formats, comma separated.
    #[arg(long, global = true, value_enum, value_delimiter = ',')]
    pub format: Option<Vec<Format>>,

    /// Last calendar year to project.
    #[arg(long, global = true)]
    pub horizon: Option<i32>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Project revenue, electricity and emissions for one scenario.
    Project {
        #[arg(value_enum, default_value = "custom")]
        scenario: ScenarioName,
    },
    /// Build EF(0) and the hash-rate distribution from pool geography.
    Ef {
        /// Directory with pools.csv, ef_world.csv and the optional companions.
        #[arg(long)]
        data_dir: Option<PathBuf>,
    },
    /// Log-derivatives of cumulative emissions plus parameter sweeps.
    Sensitivity,
    /// Electricity cost share from hardware specs.
    Alpha {
        #[arg(long)]
        hardware: Option<PathBuf>,
        #[arg(long, default_value_t = 2016)]
        from_year: i32,
    },
    /// Solve V(0) so that 2020 electricity matches the target.
    Calibrate,
}

pub fn run(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    let (config, ctx) = match &cli.config {
        Some(path) => (Config::load(path)?, Context::from_env(Some(path))),
        None => (Config::base(), Context::from_env(None)),
    };
    let formats = cli
        .format
        .clone()
        .or_else(|| config.output.formats.clone())
        .unwrap_or_else(|| vec![Format::Csv, Format::Json]);
    let out_dir = cli
        .out
        .clone()
        .or_else(|| config.output.directory.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let session = Session {
        config,
        ctx,
        out_dir,
        formats,
        horizon: cli.horizon,
    };
    match &cli.command {
        Command::Project { scenario } => commands::project_cmd(&session, *scenario),
        Command::Ef { data_dir } => commands::ef_cmd(&session, data_dir.as_deref()),
        Command::Sensitivity => commands::sensitivity_cmd(&session),
        Command::Alpha {
            hardware,
            from_year,
        } => commands::alpha_cmd(&session, hardware.as_deref(), *from_year),
        Command::Calibrate => commands::calibrate_cmd(&session),
    }
}
