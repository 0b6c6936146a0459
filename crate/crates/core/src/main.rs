use std::process::ExitCode;

use clap::Parser;
use phdim::cli::{run, Cli};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(outcome) if outcome.io_failures == 0 => ExitCode::SUCCESS,
        Ok(outcome) => {
            eprintln!("phdim: {} input(s) could not be read", outcome.io_failures);
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("phdim: {e}");
            ExitCode::from(2)
        }
    }
}
