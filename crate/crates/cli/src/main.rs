use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    spectral_bounds_cli::run(&spectral_bounds_cli::Cli::parse())
}
