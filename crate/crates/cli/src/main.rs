//! `ndr`: experiments with noisy deterministic reasoning machines.

mod args;
mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::error::CliError;

fn run(cli: Cli) -> Result<bool, CliError> {
    if let Some(n) = cli.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Simulate(a) => commands::simulate::run(&cli.global, &a),
        Command::Estimate(a) => commands::estimate::run(&cli.global, &a),
        Command::Check(a) => commands::check::run(&cli.global, &a),
        Command::Graph(a) => commands::graph::run(&cli.global, &a),
        Command::Ptm(a) => commands::ptm::run(&cli.global, &a),
        Command::Mmh(a) => commands::mmh::run(&cli.global, &a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
