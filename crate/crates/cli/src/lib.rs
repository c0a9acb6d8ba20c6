//! Command-line front end for `cavity-route`: JSON configs in, reports on
//! stdout and CSV traces out.

pub mod commands;
pub mod config;
pub mod error;
pub mod trace;

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand};

use commands::{CommonArgs, ProtocolKind, TransferArgs};
pub use error::{CliError, CliResult};

pub const THREADS_ENV: &str = "CAVITY_ROUTE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "cavity-route", version, about = "Routing in coupled atom-cavity networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decompose the network Hamiltonian into invariant blocks.
    Blocks(CommonArgs),
    /// Search the transfer time of one invariant block.
    TransferTime(TransferArgs),
    /// Compare the closed-form block amplitudes with the numeric propagator.
    ValidateAnalytic(CommonArgs),
    /// Route an excitation along a diamond chain.
    Simulate(CommonArgs),
    /// Steer an excitation through a single switch.
    Switch(CommonArgs),
    /// Route an excitation along a path of a hexagonal lattice.
    Route(CommonArgs),
    /// Transfer half of a Bell pair with any of the routing protocols.
    Entangle(CommonArgs),
}

/// Parses `argv` and runs the command. Returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = if code == 0 {
                write!(out, "{}", e.render())
            } else {
                write!(err, "{}", e.render())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Blocks(a) => commands::blocks(a, out),
        Command::TransferTime(a) => commands::transfer_time(a, out),
        Command::ValidateAnalytic(a) => commands::validate(a, out),
        Command::Simulate(a) => commands::protocol(a, ProtocolKind::Simulate, out),
        Command::Switch(a) => commands::protocol(a, ProtocolKind::Switch, out),
        Command::Route(a) => commands::protocol(a, ProtocolKind::Route, out),
        Command::Entangle(a) => commands::protocol(a, ProtocolKind::Entangle, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Caps the global thread pool when `CAVITY_ROUTE_THREADS` is set.
pub fn configure_threads(value: Option<&str>) -> CliResult<()> {
    let Some(v) = value else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(CliError::config)
}
