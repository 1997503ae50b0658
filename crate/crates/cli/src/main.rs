//! `convnls`: batch runs of the evolution, ground-state and analysis tools.

mod analyze;
mod args;
mod config;
mod error;
mod evolve;
mod groundstate;
mod init;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use config::ConfigFile;
use error::CliResult;

fn run(cli: Cli) -> CliResult<()> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let jobs = file.pick(cli.jobs, "jobs", 1usize)?;
    if jobs == 0 {
        return Err(error::CliError::Config("--jobs must be >= 1".into()));
    }
    let save = cli.save_config.as_deref();
    match cli.command {
        Command::Evolve(a) => evolve::run(a, &file, save),
        Command::Groundstate(a) => groundstate::run(a, &file, save, jobs),
        Command::Analyze { what } => analyze::run(what, &file, save),
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which the contract reserves
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("convnls: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
