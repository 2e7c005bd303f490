//! Command-line front end: probe-state table, single protocol runs, grid
//! sweeps and the validation suite.

pub mod args;
pub mod commands;
pub mod error;
pub mod output;

use args::{Cli, Command};
use error::CliError;
use output::emit;

/// Executes one parsed invocation, writing results to stdout or `--out`.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Table(a) => emit(&commands::table::table(a)?.render(a.output.format), a.output.out.as_deref()),
        Command::Protocol(a) => {
            emit(&commands::protocol::protocol(a)?.render(a.output.format), a.output.out.as_deref())
        }
        Command::Sweep(a) => emit(&commands::sweep::sweep(a)?.render(a.output.format), a.output.out.as_deref()),
        Command::Validate(a) => commands::validate::validate(a).map(|_| ()),
    }
}
