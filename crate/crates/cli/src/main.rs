//! The `mineq` binary: solve, verify, enumerate, and probe budget-capped
//! assignment markets from JSON instance files. See the library crate for
//! the file formats and the exit-code contract.

use std::path::PathBuf;
use std::process::exit;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use mineq_cli::{cmd_check, cmd_nash, cmd_oracle, cmd_solve};

#[derive(Parser)]
#[command(
    name = "mineq",
    version,
    about = "Minimum competitive equilibrium solver for assignment markets with budget caps"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve an instance and print the outcome JSON on standard output.
    Solve {
        /// Path to the instance file.
        instance: PathBuf,
        /// Include the stage-by-stage solve trace in the outcome.
        #[arg(long)]
        trace: bool,
        /// Tolerance used by --realize when lifting just-above prices.
        #[arg(long, default_value = "1/100")]
        epsilon: String,
        /// Also emit concrete prices with every just-above price lifted.
        #[arg(long)]
        realize: bool,
    },
    /// Verify an outcome file against an instance.
    Check {
        /// Path to the instance file.
        instance: PathBuf,
        /// Path to the outcome file to verify.
        outcome: PathBuf,
        /// Criterion: full equilibrium (ce), or weak/strong stability.
        #[arg(long, default_value = "ce")]
        mode: String,
    },
    /// Exhaustively enumerate equilibria on a price grid (desk scale).
    Oracle {
        /// Path to the instance file.
        instance: PathBuf,
        /// Grid step; defaults to a divisor of every finite parameter.
        #[arg(long)]
        resolution: Option<String>,
        /// Largest price tried; defaults to one past the largest parameter.
        #[arg(long)]
        bound: Option<String>,
    },
    /// Probe whether a buyer can beat truthful bidding on a deviation grid.
    Nash {
        /// Path to the instance file.
        instance: PathBuf,
        /// Name of the buyer whose bids are varied.
        #[arg(long)]
        deviator: String,
        /// JSON file of alternative bid rows; defaults to a ±1, ±2 grid.
        #[arg(long)]
        grid_spec: Option<PathBuf>,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            exit(0);
        }
        Err(e) => {
            eprint!("{e}");
            exit(1);
        }
    };

    let result = match &cli.command {
        Cmd::Solve {
            instance,
            trace,
            epsilon,
            realize,
        } => cmd_solve(instance, *trace, epsilon, *realize),
        Cmd::Check {
            instance,
            outcome,
            mode,
        } => cmd_check(instance, outcome, mode),
        Cmd::Oracle {
            instance,
            resolution,
            bound,
        } => cmd_oracle(instance, resolution.as_deref(), bound.as_deref()),
        Cmd::Nash {
            instance,
            deviator,
            grid_spec,
        } => cmd_nash(instance, deviator, grid_spec.as_deref()),
    };

    match result {
        Ok(output) => {
            print!("{}", output.stdout);
            exit(output.code);
        }
        Err(error) => {
            eprintln!("mineq: {error}");
            exit(error.exit_code());
        }
    }
}
