//! `jcrabi`: spectra, Born-Oppenheimer surfaces and Berry phases of the
//! Jaynes-Cummings and Rabi models from the command line.

mod commands;
mod config;
mod error;
mod output;
mod svg;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{BerryArgs, ConvergenceArgs, CrossingArgs, SpectrumArgs, SurfacesArgs, VerifyArgs};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "jcrabi", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lowest levels over a coupling sweep.
    Spectrum(SpectrumArgs),
    /// Berry phase of one level along the phase-rotation loop.
    Berry(BerryArgs),
    /// Born-Oppenheimer surfaces and their degeneracy set.
    Surfaces(SurfacesArgs),
    /// Lowest levels against the Fock truncation.
    Convergence(ConvergenceArgs),
    /// JC ground-state crossing coupling.
    Crossing(CrossingArgs),
    /// Run the acceptance suite.
    Verify(VerifyArgs),
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Spectrum(a) => commands::spectrum(a),
        Command::Berry(a) => commands::berry(a),
        Command::Surfaces(a) => commands::surfaces(a),
        Command::Convergence(a) => commands::convergence(a),
        Command::Crossing(a) => commands::crossing(a),
        Command::Verify(a) => commands::verify(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
