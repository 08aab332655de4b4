use std::process::ExitCode;

use clap::Parser;
use gexpand::cli::{exit_code, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("gexpand: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
