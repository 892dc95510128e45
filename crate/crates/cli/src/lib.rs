//! Command-line front end for the `fcar` library: CSV ingestion, the
//! `simulate`, `fit`, `forecast` and `replicate` commands, and CSV/SVG
//! report emission.

pub mod commands;
pub mod config;
pub mod data;
pub mod error;
pub mod output;
pub mod svg;

pub use config::{parse_args, try_parse_args, Cli, Command};
pub use error::{CliError, Result};

/// Runs a parsed command on a pool of `cli.workers` threads.
pub fn execute(cli: &Cli) -> Result<()> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(CliError::Config("--workers must be at least 1".into()));
        }
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| CliError::Config(e.to_string()))?;
    pool.install(|| match &cli.command {
        Command::Simulate(a) => commands::cmd_simulate(a),
        Command::Fit(a) => commands::cmd_fit(a).map(drop),
        Command::Forecast(a) => commands::cmd_forecast(a).map(drop),
        Command::Replicate(a) => commands::cmd_replicate(a),
    })
}
