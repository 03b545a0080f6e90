//! Command-line front end for `cur-spca`: CSV matrix I/O, one subcommand per
//! method, the simulation harness, and JSON run reports.

pub mod commands;
pub mod io;
pub mod report;

use std::time::Instant;

use thiserror::Error;

pub use commands::Cli;
pub use report::{Metrics, RunReport, SCHEMA};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] cur_spca::Error),
    #[error(transparent)]
    Io(#[from] io::IoError),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    /// 2 for bad or infeasible parameters, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(cur_spca::Error::Parameter(_) | cur_spca::Error::Infeasible(_)) => 2,
            _ => 1,
        }
    }
}

/// Run a parsed command line, write `report.json` next to any other outputs,
/// and return the report text.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    let start = Instant::now();
    let (mut report, dir) = commands::run(&cli.command)?;
    report.timing_ms = start.elapsed().as_millis() as u64;
    let text = report.to_json();
    if let Some(dir) = dir {
        io::write_text(&dir.join("report.json"), &text)?;
    }
    Ok(text)
}
