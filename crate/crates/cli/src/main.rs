//! `emharm`: evaluate electrodynamic spherical harmonics, run verification
//! suites, and solve spherical scattering problems.

mod error;
mod eval;
mod format;
mod samples;
mod solve;
mod synth;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "emharm", version, about = "Electrodynamic spherical harmonics toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate Y_lm, X_lm or F_lm on a (θ, φ) grid.
    Eval(eval::EvalArgs),
    /// Run an invariant suite and report the worst error per check.
    Verify(verify::VerifyArgs),
    /// Match partial waves at spherical interfaces; optionally project field samples.
    Solve(solve::SolveArgs),
    /// Synthesize fields from partial waves on a spherical grid.
    Synth(synth::SynthArgs),
}

fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var("TW_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::validation(format!("TW_THREADS must be a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Numerical(e.to_string()))
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    match &cli.command {
        Command::Eval(a) => eval::run(a),
        Command::Verify(a) => verify::run(a),
        Command::Solve(a) => solve::run(a),
        Command::Synth(a) => synth::run(a),
    }
}

fn main() -> ExitCode {
    // clap exits with code 2 on usage errors
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("emharm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
