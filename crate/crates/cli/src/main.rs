use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    match plh_cli::run(plh_cli::Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
