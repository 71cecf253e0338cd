//! `lambda-qpt` command-line front end.

mod args;
mod commands;
mod config;
mod output;

use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{CommandFactory, Parser};

use args::Cli;
use output::Run;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
    let clock = Instant::now();

    let resolved = match config::resolve(&cli) {
        Ok(r) => r,
        Err(config::ConfigError::Usage(msg)) => Cli::command().error(clap::error::ErrorKind::ValueValidation, msg).exit(),
        Err(config::ConfigError::Io(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };

    if let Some(threads) = resolved.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: cannot size worker pool: {e}");
            return ExitCode::from(1);
        }
    }

    let mut run = Run::new(&resolved);
    if let Err(e) = commands::dispatch(&resolved, &mut run) {
        if let commands::CmdError::Usage(msg) = e {
            Cli::command().error(clap::error::ErrorKind::MissingRequiredArgument, msg).exit();
        }
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match run.finish(started, clock.elapsed()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
