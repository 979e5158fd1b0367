use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = ergodix_cli::Cli::parse();
    ExitCode::from(ergodix_cli::run(&cli))
}
