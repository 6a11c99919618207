//! Batch front end for the `l2uwe` enhancer: `enhance`, `compare` and
//! `inspect` verbs, run manifests and aggregate metric reports.

pub mod args;
pub mod compare;
pub mod config;
pub mod dump;
pub mod enhance;
pub mod files;
pub mod inspect;

use std::process::ExitCode;

use log::warn;

use crate::args::{Cli, Command};

pub use compare::{run_compare, CompareReport};
pub use enhance::{run_enhance, RunManifest};
pub use inspect::run_inspect;

/// Failure classes, each with its own exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad arguments, config, or unusable paths.
    #[error("{0:#}")]
    Invalid(anyhow::Error),
    #[error("{0}")]
    NothingProcessed(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Invalid(_) => ExitCode::from(1),
            CliError::NothingProcessed(_) => ExitCode::from(2),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Invalid(e)
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Enhance(a) => {
            let cfg = config::resolve(&a.config)?;
            let jobs = a.jobs.unwrap_or_else(enhance::default_jobs);
            let manifest = run_enhance(&a.inputs, &a.output, &cfg, jobs)?;
            let ok = manifest.succeeded();
            let total = manifest.records.len();
            if ok == 0 {
                return Err(CliError::NothingProcessed(format!("no image processed ({total} inputs)")));
            }
            if ok < total {
                warn!("{} of {total} images failed, see the manifest", total - ok);
            }
            println!("{ok} of {total} images written to {}", a.output.display());
        }
        Command::Compare(a) => {
            let report = run_compare(&a.original, &a.enhanced, &a.output)?;
            let scored = report.scored().count();
            if !report.pairs.is_empty() && scored == 0 {
                return Err(CliError::NothingProcessed("no pair could be scored".into()));
            }
            println!("{scored} pairs scored, {} unmatched", report.unmatched.len());
        }
        Command::Inspect(a) => {
            let cfg = config::resolve(&a.config)?;
            let summary = run_inspect(&a.input, &a.output, &cfg)?;
            println!("{}", serde_json::to_string_pretty(&summary).map_err(anyhow::Error::from)?);
        }
    }
    Ok(())
}
