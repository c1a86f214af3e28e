//! Experiment runner for `spectral-bounds`: every scenario is a subcommand
//! that reads a JSON document and writes JSON and CSV into `--out`.
//!
//! Exit codes: `0` success, `1` verification failure, `2` input error.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};

use spectral_bounds::dissection::NConvention;

pub mod commands;
pub mod config;
pub mod output;
pub mod schema;

use commands::bound::Operator;
use commands::Outcome;
use config::{parse_override, RunConfig};

pub const EXIT_VERIFICATION: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "spectral-bounds", version, about = "Spectral lower bounds: solvers, sweeps and verifiers")]
pub struct Cli {
    /// Output directory (created if missing).
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,

    /// Seed for randomized suites.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,

    /// Input JSON document.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Set a (dotted) key of the input document; repeatable.
    #[arg(long = "override", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ConventionArg {
    Unordered,
    Literal,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues of a Sturm-Liouville problem in a window.
    SlSolve {
        /// Run both solvers and record their agreement.
        #[arg(long)]
        cross_validate: bool,
    },
    /// Tube spectra along a degeneration schedule.
    TubeSweep,
    /// Dissection lower bound for a cover.
    Bound {
        /// Treat set values as Dirac eigenvalues and bound `λ_N`.
        #[arg(long, conflicts_with = "laplacian")]
        dirac: bool,
        /// Bound the Laplace-type eigenvalue `μ_N` (default).
        #[arg(long)]
        laplacian: bool,
        #[arg(long, value_enum, default_value = "unordered")]
        n_convention: ConventionArg,
    },
    /// Two-arc cover of a discretised circle against its true spectrum.
    S1Dissect,
    /// Seeded suite of ODE comparison checks.
    CompareOde,
    /// Rescaled eigenvalue lower bound along a volume-growing family.
    BergerCurve,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::SlSolve { .. } => "sl-solve",
            Command::TubeSweep => "tube-sweep",
            Command::Bound { .. } => "bound",
            Command::S1Dissect => "s1-dissect",
            Command::CompareOde => "compare-ode",
            Command::BergerCurve => "berger-curve",
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let config = RunConfig {
        subcommand: cli.command.name(),
        input: cli.config.clone(),
        out: cli.out.clone(),
        overrides: cli.overrides.iter().map(|s| parse_override(s)).collect::<Result<_>>()?,
        seed: cli.seed,
    };
    match &cli.command {
        Command::SlSolve { cross_validate } => commands::sl_solve::run(&config, *cross_validate),
        Command::TubeSweep => commands::tube_sweep::run(&config),
        Command::Bound { dirac, n_convention, .. } => {
            let operator = if *dirac { Operator::Dirac } else { Operator::Laplacian };
            let convention = match n_convention {
                ConventionArg::Unordered => NConvention::Unordered,
                ConventionArg::Literal => NConvention::Literal,
            };
            commands::bound::run(&config, operator, convention)
        }
        Command::S1Dissect => commands::s1_dissect::run(&config),
        Command::CompareOde => commands::compare_ode::run(&config),
        Command::BergerCurve => commands::berger_curve::run(&config),
    }
}

pub fn run(cli: &Cli) -> ExitCode {
    match dispatch(cli) {
        Ok(outcome) if outcome.passed => {
            println!("{}: {}", cli.command.name(), outcome.summary);
            ExitCode::SUCCESS
        }
        Ok(outcome) => {
            println!("{}: {}", cli.command.name(), outcome.summary);
            eprintln!("{}: verification failed", cli.command.name());
            ExitCode::from(EXIT_VERIFICATION)
        }
        Err(e) => {
            eprintln!("{}: error: {e:#}", cli.command.name());
            ExitCode::from(EXIT_INPUT)
        }
    }
}
