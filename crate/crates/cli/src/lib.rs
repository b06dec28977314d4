//! Command line front end: configuration, dispatch and reports.

mod commands;
mod config;
mod error;
mod report;

use std::path::PathBuf;

use clap::Parser;

pub use commands::{load_config, run_command, Command, PointQuery};
pub use config::{
    config_to_json, parse_config, search_bounds_override, Config, Options, SearchOptions,
};
pub use error::CliError;
pub use report::{emit_report, Check, Format, Report, Status};

#[derive(Debug, Parser)]
#[command(
    name = "taf",
    version,
    about = "Outer automorphisms of triangular alternation limit algebras"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON configuration with profiles `r` and `s`.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

/// Runs a parsed command line, returning the rendered report and exit code.
pub fn execute(cli: &Cli) -> Result<(String, i32), CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::InvalidArgument("--config <file> is required".into()))?;
    let config = load_config(path)?;
    let report = run_command(&config, &cli.command)?;
    Ok((emit_report(&report, cli.format), report.exit_code()))
}
