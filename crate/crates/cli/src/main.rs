mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Exit status and message for a failed command.
#[derive(Debug)]
pub enum CliError {
    /// Rejected input: exit 2.
    Input(String),
    /// Computation or I/O failure on valid input: exit 3.
    Runtime(String),
}

impl From<esdlab::Error> for CliError {
    fn from(e: esdlab::Error) -> Self {
        if e.is_runtime() {
            CliError::Runtime(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Evolve(a) => commands::evolve(a),
        Command::EsdTime(a) => commands::esd_time(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::WernerScan(a) => commands::werner_scan(a),
        Command::Validate(a) => commands::validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
