use clap::{Parser, Subcommand};
use lab_core::cli::{cmd_audit, cmd_constants, cmd_evolve, cmd_oracle, error_exit_code};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "lab",
    version,
    about = "Pseudo-spectral laboratory for incompressible flow on the 3-torus: \
             inequality audits, constant tables and Galerkin Navier-Stokes/Euler runs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the inequality audit suite over a random-field corpus
    Audit {
        /// Flat key = value config file
        config: PathBuf,
    },
    /// Integrate the truncated dynamics and audit the energy identity
    Evolve {
        /// Flat key = value config file
        config: PathBuf,
    },
    /// Print the constant table for the given Sobolev indices
    Constants {
        /// Indices to tabulate; a default grid is used when omitted
        s: Vec<f64>,
    },
    /// Cross-check the independent evaluation routes
    Oracle {
        #[arg(long, default_value_t = 8)]
        resolution: usize,
        #[arg(long, default_value_t = 5)]
        seeds: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Audit { config } => cmd_audit(config),
        Command::Evolve { config } => cmd_evolve(config),
        Command::Constants { s } => cmd_constants(s),
        Command::Oracle { resolution, seeds } => cmd_oracle(*resolution, *seeds),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_exit_code(&e) as u8)
        }
    }
}
