use std::process::ExitCode;

use clap::Parser;
use wigner_bounds_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wigner-bounds: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
