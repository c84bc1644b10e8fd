//! Command-line front end of the `toroidq` binary.
//!
//! ```text
//! toroidq <command> [--config <file>] [--figure N] [--out <path>]
//!         [--format csv|json] [--workers K] [--strict]
//! ```
//!
//! The configuration is built from the figure preset (if any), then the TOML
//! file, then the command-line flags. Exit codes: 0 on success, 1 for
//! configuration errors, 2 for computational failures in strict mode.

mod commands;
pub mod config;
pub mod presets;
pub mod table;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

pub use commands::run;
pub use config::{FileConfig, Format};
pub use table::{Cell, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    /// Transmission and reflection versus cavity detuning.
    Spectrum,
    /// Steady state versus coupling strength.
    SweepCoupling,
    /// Steady state versus drive strength.
    SweepDrive,
    /// Semiclassical bistability curve and turning points.
    Bistability,
    /// Output pulse shapes in the time domain.
    Pulse,
    /// Entangled-path state fidelity versus pulse photon number.
    Fidelity,
    /// Field-amplitude table for strong overcoupling.
    #[value(name = "table1-check")]
    TableOneCheck,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("computation failed: {0}")]
    Computation(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Computation(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "toroidq", version, about = "Microtoroid cavity QED simulations")]
pub struct Cli {
    pub command: Command,
    /// TOML configuration file; required unless --figure is given.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Load the built-in preset for this figure number (2-9).
    #[arg(long)]
    pub figure: Option<u8>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Abort on the first failed grid point.
    #[arg(long)]
    pub strict: bool,
}

impl Cli {
    /// Preset, then file, then flags.
    pub fn resolve(&self) -> Result<FileConfig, CliError> {
        if self.config.is_none() && self.figure.is_none() {
            return Err(CliError::Config("either --config or --figure is required".into()));
        }
        let fragments = match self.figure {
            Some(n) => presets::preset(n, self.command)?,
            None => Vec::new(),
        };
        let mut cfg = config::load(&fragments, self.config.as_deref())?;
        if let Some(out) = &self.out {
            cfg.output.path = Some(out.clone());
        }
        if let Some(format) = self.format {
            cfg.output.format = format;
        }
        if let Some(workers) = self.workers {
            cfg.run.workers = workers;
        }
        cfg.run.strict |= self.strict;
        if cfg.run.workers == 0 {
            return Err(CliError::Config("run.workers: must be at least 1".into()));
        }
        Ok(cfg)
    }
}

fn render(table: &Table, format: Format) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    }
}

/// Parses arguments, runs the command and writes the output.
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let cfg = cli.resolve()?;
    let table = run(cli.command, &cfg)?;
    let text = render(&table, cfg.output.format);
    match &cfg.output.path {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Config(format!("output.path {}: {e}", path.display())))
        }
        None => match std::io::stdout().write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Config(format!("stdout: {e}"))),
            _ => Ok(()),
        },
    }
}

/// Entry point shared by the binary and the tests.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("toroidq: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
