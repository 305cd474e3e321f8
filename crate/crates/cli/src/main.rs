//! `bec-lab`: solves, sweeps and verification reports for the heteroclinic
//! interface of a segregated two-component condensate.
//!
//! Exit codes: 0 success, 1 usage or precondition error, 2 numerical
//! failure, 3 verification failure.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bec_lab::parallel::{thread_cap_from_env, with_thread_cap};
use bec_lab::LabError;

use config::{Options, RunConfig};

#[derive(Parser)]
#[command(name = "bec-lab", version, about = "Heteroclinic interface lab for segregated two-component condensates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the blow-up profile and report its far-field offset.
    Blowup(Options),
    /// Solve the heteroclinic at one coupling.
    Solve(Options),
    /// Follow the branch from the explicit solution through a list of couplings.
    Continue(Options),
    /// Compare the composite approximation with the computed heteroclinic.
    Composite(Options),
    /// Bottom of the linearized spectrum at one coupling.
    Spectrum(Options),
    /// Interface tension and its strong-coupling expansion.
    Energy(Options),
    /// Full sweep graded against the acceptance bands.
    Verify(Options),
}

/// A failed run, carrying its exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    Numerical(anyhow::Error),
    Verification(Vec<String>),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Numerical(_) => 2,
            Failure::Verification(_) => 3,
        }
    }
}

impl From<LabError> for Failure {
    fn from(e: LabError) -> Failure {
        match e {
            LabError::InvalidInput(_)
            | LabError::LengthMismatch { .. }
            | LabError::LambdaMismatch(..)
            | LabError::OutOfRange { .. } => Failure::Usage(e.into()),
            other => Failure::Numerical(other.into()),
        }
    }
}

type Handler = fn(&RunConfig) -> Result<(), Failure>;

fn run(cli: Cli) -> Result<(), Failure> {
    let (name, opts, handler): (&str, Options, Handler) = match cli.command {
        Command::Blowup(o) => ("blowup", o, commands::blowup),
        Command::Solve(o) => ("solve", o, commands::solve),
        Command::Continue(o) => ("continue", o, commands::continue_branch),
        Command::Composite(o) => ("composite", o, commands::composite),
        Command::Spectrum(o) => ("spectrum", o, commands::spectrum),
        Command::Energy(o) => ("energy", o, commands::energy),
        Command::Verify(o) => ("verify", o, commands::verify),
    };
    let cfg = RunConfig::resolve(name, opts).map_err(Failure::Usage)?;
    handler(&cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match with_thread_cap(thread_cap_from_env(), || run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(e) => eprintln!("error: {e:#}"),
                Failure::Numerical(e) => eprintln!("numerical failure: {e:#}"),
                Failure::Verification(names) => eprintln!("verification failed: {}", names.join(", ")),
            }
            ExitCode::from(f.code())
        }
    }
}
