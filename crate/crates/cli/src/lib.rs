//! Command-line front end for `sternet`: panel ingestion, configuration and
//! the `simulate`, `fit`, `ppc`, `diagnose` and `recover` commands.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;

use std::path::Path;

use config::{Overrides, RunConfig};
use error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Fit,
    Ppc,
    Diagnose,
    Recover,
}

/// Loads the configuration and runs `command`; returns the text for stdout.
pub fn run(command: Command, config: Option<&Path>, ov: &Overrides) -> CliResult<String> {
    let cfg = RunConfig::load(config, ov)?;
    if let Some(n) = cfg.threads {
        if n == 0 {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match command {
        Command::Simulate => commands::simulate(&cfg),
        Command::Fit => commands::fit(&cfg),
        Command::Ppc => commands::run_ppc(&cfg),
        Command::Diagnose => commands::diagnose(&cfg),
        Command::Recover => commands::recover(&cfg),
    }
}
