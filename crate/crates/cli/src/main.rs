use std::process::ExitCode;

use clap::Parser;
use vdw_cli::{run, Args, CliError};

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::Validation(e.to_string())),
    };
    let outcome = match run(&args) {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    if let Err(e) = outcome.write() {
        return fail(&e);
    }
    match &outcome.failure {
        Some(e) => fail(e),
        None => ExitCode::SUCCESS,
    }
}
