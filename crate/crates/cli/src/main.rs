//! `bozdl`: spectra, characteristics, quantization, evolution and
//! zero-dispersion experiments for periodic Benjamin–Ono data.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod svg;

use std::process::ExitCode;

use bozdl_core::Error;
use clap::{Parser, Subcommand};

use config::{CommonArgs, Config, ConfigError, Defaults};

#[derive(Parser)]
#[command(name = "bozdl", version, about = "Zero-dispersion experiments for periodic Benjamin-Ono")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lax spectrum and Birkhoff data (JSON + CSV), optionally against quantization roots.
    Spectrum(#[command(flatten)] CommonArgs),
    /// Multivalued Burgers branches, alternating sums and breaking report.
    Burgers(#[command(flatten)] CommonArgs),
    /// Roots of the cosine eigenvalue equation.
    Quantize(#[command(flatten)] CommonArgs),
    /// Reconstruction of the evolved solution, optionally against a direct solver.
    Evolve(#[command(flatten)] CommonArgs),
    /// Error table of the spectral Fourier modes against the Burgers limit.
    Zdl(#[command(flatten)] CommonArgs),
}

const CONFIG_EXIT: u8 = 2;
const NUMERICAL_EXIT: u8 = 3;

/// Input problems exit with 2, everything else with 3.
fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() {
        return CONFIG_EXIT;
    }
    match err.downcast_ref::<Error>() {
        Some(
            Error::NonZeroMean { .. }
            | Error::GridTooCoarse { .. }
            | Error::NotSingleWell(_)
            | Error::MinNotAtOrigin { .. }
            | Error::DegenerateInflection { .. }
            | Error::RangeError { .. }
            | Error::TruncationTooSmall { .. }
            | Error::QuadratureBudgetExceeded { .. }
            | Error::RegimeMismatch(_)
            | Error::InvalidParameter(_),
        ) => CONFIG_EXIT,
        Some(_) => NUMERICAL_EXIT,
        None if err.downcast_ref::<std::io::Error>().is_some() => CONFIG_EXIT,
        None => NUMERICAL_EXIT,
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    type Runner = fn(&Config) -> anyhow::Result<bozdl_core::io::Manifest>;
    let (args, defaults, runner): (CommonArgs, Defaults, Runner) = match cli.command {
        Command::Spectrum(a) => (a, commands::SPECTRUM_DEFAULTS, commands::spectrum),
        Command::Burgers(a) => (a, commands::BURGERS_DEFAULTS, commands::burgers),
        Command::Quantize(a) => (a, commands::QUANTIZE_DEFAULTS, commands::quantize),
        Command::Evolve(a) => (a, commands::EVOLVE_DEFAULTS, commands::evolve_cmd),
        Command::Zdl(a) => (a, commands::ZDL_DEFAULTS, commands::zdl),
    };
    let cfg = Config::resolve(&args, &defaults)?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| config::config_error(format!("cannot start {n} worker threads: {e}")))?;
    }
    let manifest = runner(&cfg)?;
    for f in &manifest.files {
        println!("{}", cfg.out.join(f).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
