//! Batch driver: reads a JSON run config, runs one command and writes a
//! CSV or JSON table.

pub mod commands;
pub mod config;
pub mod diag;
pub mod error;
pub mod table;

use std::path::PathBuf;

use clap::Parser;

pub use commands::{execute, Command};
pub use config::{Format, RunConfig};
pub use error::CliError;
pub use table::Table;

#[derive(Debug, Parser)]
#[command(name = "vdw", version, about = "Renormalized van der Waals stress, anomaly and condensate shifts")]
pub struct Args {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run config.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads; defaults to the hardware parallelism.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Reserved. Every computation is deterministic.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

/// Rendered result of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub path: Option<PathBuf>,
    /// Set when the table was produced but reports failed checks.
    pub failure: Option<CliError>,
}

impl Outcome {
    /// Writes the text to its file or to standard output.
    pub fn write(&self) -> Result<(), CliError> {
        match &self.path {
            Some(path) => std::fs::write(path, &self.text)
                .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display()))),
            None => {
                use std::io::Write;
                std::io::stdout()
                    .write_all(self.text.as_bytes())
                    .map_err(|e| CliError::Validation(format!("cannot write output: {e}")))
            }
        }
    }
}

pub fn run(args: &Args) -> Result<Outcome, CliError> {
    let mut config = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None if args.command.needs_config() => {
            return Err(CliError::Validation(format!("'{}' needs --config", args.command.name())))
        }
        None => RunConfig::default(),
    };
    if let Some(path) = &args.output {
        config.output.path = Some(path.clone());
    }
    if let Some(format) = args.format {
        config.output.format = format;
    }
    config.validate_output()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(CliError::Validation("--threads must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Validation(format!("thread pool: {e}")))?;
    let table = pool.install(|| execute(args.command, &config))?;
    let text = table.render(config.output.format, &config);
    let failure = (args.command == Command::Diag && !commands::all_passed(&table))
        .then(|| CliError::NonConvergence("diag checks failed".into()));
    Ok(Outcome { text, path: config.output.path.clone(), failure })
}
