//! Command-line front end: Matrix Market I/O, solves and benchmark sweeps.

pub mod args;
pub mod commands;
pub mod error;
pub mod mm;
pub mod report;

pub use args::Cli;
pub use error::{CliError, Result};

use args::Command;

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<()> {
    commands::with_threads(cli.threads, || match &cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Solve(a) => commands::solve(a).map(|_| ()),
        Command::Bench(a) => commands::bench(a).map(|_| ()),
    })?
}
