//! `lgpoly`: experiments on the log-Gamma polymer from the command line.
//!
//! Exit status is 0 on success, 1 for an invalid configuration or violated
//! precondition, and 2 when a numerical scheme fails to converge.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use commands::{descent, fluct, laplace, semidiscrete, twdist};
use config::{echo, read_config_file, resolve, CommandConfig, Common, CommonFlags};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "lgpoly", version, about = "Log-Gamma polymer Laplace transforms and Tracy-Widom fluctuations")]
struct Cli {
    #[command(flatten)]
    common: CommonFlags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compare E[exp(-u Z(n, N))] across Monte Carlo, nfold, Nystrom and finite-rank.
    Laplace(laplace::LaplaceFlags),
    /// KS distance of scaled log Z(n, n) fluctuations to GUE Tracy-Widom.
    Fluct(fluct::FluctFlags),
    /// Tabulate the GUE Tracy-Widom CDF from the limiting kernel.
    Twdist(twdist::TwdistFlags),
    /// Fit the steepest-descent constants for the exponent G.
    Descent(descent::DescentFlags),
    /// Semi-discrete N = 1 determinant against the log-normal oracle.
    Semidiscrete(semidiscrete::SemidiscreteFlags),
}

fn prepare<C: CommandConfig>(
    name: &str,
    common_flags: &CommonFlags,
    flags: &impl Serialize,
) -> Result<(Common, C, serde_json::Value), CliError> {
    let file = common_flags.config.as_deref().map(read_config_file).transpose()?;
    let (common, cfg) = resolve::<C>(file, common_flags, flags)?;
    if let Some(threads) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot start {threads} worker threads: {e}")))?;
    }
    let config = echo(name, &common, &cfg);
    Ok((common, cfg, config))
}

fn run(cli: Cli) -> Result<(), CliError> {
    let c = &cli.common;
    match &cli.command {
        Command::Laplace(f) => {
            let (common, cfg, config) = prepare::<laplace::LaplaceConfig>("laplace", c, f)?;
            laplace::run(&common, &cfg, &config)
        }
        Command::Fluct(f) => {
            let (common, cfg, config) = prepare::<fluct::FluctConfig>("fluct", c, f)?;
            fluct::run(&common, &cfg, &config)
        }
        Command::Twdist(f) => {
            let (common, cfg, config) = prepare::<twdist::TwdistConfig>("twdist", c, f)?;
            twdist::run(&common, &cfg, &config)
        }
        Command::Descent(f) => {
            let (common, cfg, config) = prepare::<descent::DescentConfig>("descent", c, f)?;
            descent::run(&common, &cfg, &config)
        }
        Command::Semidiscrete(f) => {
            let (common, cfg, config) = prepare::<semidiscrete::SemidiscreteConfig>("semidiscrete", c, f)?;
            semidiscrete::run(&common, &cfg, &config)
        }
    }
}

fn main() -> ExitCode {
    // clap reports usage errors with status 2, which is reserved here for
    // numerical failures.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lgpoly: {e}");
            e.exit_code()
        }
    }
}
