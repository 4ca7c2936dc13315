//! `kfermion` command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or validation
//! error, 3 numeric range error.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::commands::{IdentityArgs, LimitArgs, NormalizeArgs, VerifyArgs};

/// Largest k accepted anywhere on the command line.
pub const MAX_K: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "kfermion",
    version,
    about = "Exact checks for the k-fermion algebra at q = exp(2πi/k)"
)]
struct Cli {
    /// Output format; defaults to $KFERMION_FORMAT, then text.
    #[arg(long, global = true, value_enum, env = "KFERMION_FORMAT", default_value = "text")]
    format: Format,

    /// Write output to this file instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the defining relations, adjoints, Grassmann realization and
    /// coherent eigenstates for each k in a range.
    Verify(VerifyArgs),
    /// Sweep integration conventions for the resolution of identity.
    Identity(IdentityArgs),
    /// Convergence tables for the Q → q degeneration.
    Limit(LimitArgs),
    /// Normal-order an operator expression and check it against the Fock matrices.
    Normalize(NormalizeArgs),
}

/// Outcome of a subcommand, mapped onto the process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    Failure = 1,
    Usage = 2,
    Range = 3,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut sink = match output::Sink::open(cli.output.as_deref()) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(Status::Usage as u8);
        }
    };
    let status = match &cli.command {
        Command::Verify(args) => commands::verify(args, cli.format, &mut sink),
        Command::Identity(args) => commands::identity(args, cli.format, &mut sink),
        Command::Limit(args) => commands::limit(args, cli.format, &mut sink),
        Command::Normalize(args) => commands::normalize(args, cli.format, &mut sink),
    };
    let status = match status {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            Status::Failure
        }
    };
    ExitCode::from(status as u8)
}
