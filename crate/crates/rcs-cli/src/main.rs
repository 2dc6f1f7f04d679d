//! `rcs` — robust confidence sequences over contaminated data streams.
//!
//! Subcommands: `track` follows a stream of numbers and emits interval rows;
//! `simulate` runs a Monte Carlo experiment from a JSON config; `figure`
//! regenerates the data files behind the standard figures; `compare` runs
//! several methods against a shared model.
//!
//! Exit codes: 0 success, 2 usage error, 3 data error, 4 I/O error.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod experiments;
mod figures;
mod track;

/// Environment variable holding the default output directory for commands
/// that write files.
pub const OUT_DIR_ENV: &str = "RCS_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "rcs",
    version,
    about = "Robust confidence sequences over contaminated data streams"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Track a stream of numbers and emit `t,x,lower,upper,estimate` rows.
    Track(track::TrackArgs),
    /// Run a Monte Carlo experiment described by a JSON config file.
    Simulate(experiments::SimulateArgs),
    /// Write the CSV data behind one of the standard figures.
    Figure(figures::FigureArgs),
    /// Run several methods on a shared model and emit a combined table.
    Compare(experiments::CompareArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Track(args) => track::run(&args),
        Command::Simulate(args) => experiments::simulate(&args),
        Command::Figure(args) => figures::run(&args),
        Command::Compare(args) => experiments::compare(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                robust_cs::Error::Io(_) => ExitCode::from(4),
                _ => ExitCode::from(3),
            }
        }
    }
}

/// Render one CSV float; infinite endpoints become `-inf`/`inf`.
pub(crate) fn fmt_value(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v}")
    }
}

/// Resolve the output directory: flag, then `RCS_OUT_DIR`, then `.`.
pub(crate) fn resolve_out_dir(flag: &Option<std::path::PathBuf>) -> std::path::PathBuf {
    flag.clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(std::path::PathBuf::from))
        .unwrap_or_else(|| std::path::PathBuf::from("."))
}
