//! Batch front-end for manifoldkit. See `manifoldkit --help` for the file
//! formats and exit codes.

// `!(x > y)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod cli;
mod commands;
mod config;
mod error;
mod matrix_file;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = cli::Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("manifoldkit: {} error: {e}", e.class());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
