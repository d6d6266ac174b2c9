mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, FileConfig};
use commands::Outcome;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = FileConfig::load(cli.config.as_deref()).and_then(|file| match cli.command {
        Command::Simulate(a) => commands::simulate(a, &file),
        Command::Tradeoff(a) => commands::tradeoff(a, &file),
        Command::Table(a) => commands::table(a, &file),
        Command::Verify(a) => commands::verify(a, &file),
    });
    match result {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::InvariantFailure) => ExitCode::from(1),
        Err(e) => {
            eprintln!("xdof: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
