//! Command-line front end: run simulations, verification suites, parameter
//! sweeps, and convergence studies from JSON configs.
//!
//! Exit codes: 0 on success (simulation completed / all checks hold),
//! 2 when the blow-up detector fired, 1 on any error.
//! `FRACRD_LOG` in {error, info, debug} controls verbosity (default info).

mod commands;
mod config;
mod log;
mod outputs;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Run(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
            CliError::Run(m) => write!(f, "{m}"),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "fracrd",
    about = "Fractional reaction-diffusion solver and verification toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation from a JSON config.
    Simulate {
        config: PathBuf,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override the seed used by random initial profiles.
        #[arg(long)]
        seed: Option<u64>,
        /// Emit an SVG plot of the diagnostics.
        #[arg(long)]
        plot: bool,
    },
    /// Run the verification suite.
    Verify {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override the suite seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a cartesian parameter sweep of independent simulations.
    Sweep {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Bounded worker count (default: available parallelism).
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        plot: bool,
    },
    /// Run a time-step convergence study on the linear benchmark.
    Converge {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    log::init_from_env();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate {
            config,
            out,
            seed,
            plot,
        } => commands::cmd_simulate(&config, &out, seed, plot),
        Command::Verify { config, out, seed } => commands::cmd_verify(&config, &out, seed),
        Command::Sweep {
            config,
            out,
            workers,
            seed,
            plot,
        } => commands::cmd_sweep(&config, &out, workers, seed, plot),
        Command::Converge { config, out } => commands::cmd_converge(&config, &out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            log::error(&format!("{e}"));
            ExitCode::from(1)
        }
    }
}
