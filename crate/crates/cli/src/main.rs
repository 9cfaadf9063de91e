//! Batch CLI for the corpus quality filtering pipeline.
//!
//! Exit codes: 0 success, 1 usage/config error, 2 data error,
//! 3 degenerate-distribution error.

mod commands;
mod error;
mod tables;

use clap::error::ErrorKind;
use clap::Parser;

use commands::Cli;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            // clap renders its own message (help goes to stdout).
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match commands::run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(cause) = source {
                eprintln!("  caused by: {cause}");
                source = cause.source();
            }
            std::process::exit(e.exit_code());
        }
    }
}
