//! Command-line front end for `qnd-core`: parity and CNOT demonstrations,
//! error-rate sweeps and photon budgets, written as CSV or JSON.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::f64::consts::E;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{Format, GridSpec, RunConfig};
pub use error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "qnd", version, about = "Cross-Kerr parity gate simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct Physics {
    /// Probe amplitude.
    #[arg(long, default_value_t = 1000.0)]
    pub alpha: f64,

    /// Cross-Kerr phase in radians.
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub theta: f64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the parity gate on the equal superposition and report outcome statistics.
    ParityDemo {
        #[command(flatten)]
        physics: Physics,
        #[arg(long, default_value_t = 10_000)]
        runs: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Run the CNOT on product inputs and report fidelity to the ideal gate.
    CnotTable {
        #[command(flatten)]
        physics: Physics,
        #[arg(long, default_value_t = 20)]
        runs: u64,
        /// Comma-separated two-letter inputs over H, V, +, -.
        #[arg(long, value_delimiter = ',', default_values_t = commands::DEFAULT_CNOT_INPUTS.map(String::from))]
        inputs: Vec<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Tabulate the misclassification probability over an (alpha, theta) grid.
    Sweep {
        /// lo:hi:steps, geometric spacing.
        #[arg(long, default_value = "10:10000:4")]
        alpha_grid: GridSpec,
        /// lo:hi:steps, linear spacing.
        #[arg(long, default_value = "0.05:0.3:6")]
        theta_grid: GridSpec,
        #[command(flatten)]
        output: Output,
    },
    /// Failure probability of a heralded single-photon budget.
    Budget {
        /// Photons required.
        #[arg(long)]
        n: u64,
        /// Overhead factor; c·n attempts are made.
        #[arg(long, conflicts_with = "target", required_unless_present = "target")]
        c: Option<u64>,
        /// Per-attempt heralding probability; the default is 1/e.
        #[arg(long, default_value_t = 1.0 / E)]
        p: f64,
        /// Find the smallest c with failure at most this value.
        #[arg(long)]
        target: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
}

fn emit(output: &Output, text: &str) -> Result<()> {
    match &output.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::ParityDemo { physics, runs, output } => {
            let config = RunConfig {
                alpha: physics.alpha,
                theta: physics.theta,
                seed: physics.seed,
                runs,
                ..RunConfig::default()
            };
            let rows = commands::parity_demo(&config)?;
            emit(&output, &render_rows(&rows, output.format.unwrap_or(Format::Csv))?)
        }
        Command::CnotTable { physics, runs, inputs, output } => {
            let config = RunConfig {
                alpha: physics.alpha,
                theta: physics.theta,
                seed: physics.seed,
                runs,
                ..RunConfig::default()
            };
            let rows = commands::cnot_table(&config, &inputs)?;
            emit(&output, &render_rows(&rows, output.format.unwrap_or(Format::Csv))?)
        }
        Command::Sweep { alpha_grid, theta_grid, output } => {
            let config = RunConfig {
                alpha_grid,
                theta_grid,
                ..RunConfig::default()
            };
            let table = commands::sweep(&config)?;
            let text = match output.format.unwrap_or(Format::Csv) {
                Format::Csv => report::to_csv(&table.rows)?,
                Format::Json => report::to_json(&table)?,
            };
            emit(&output, &text)
        }
        Command::Budget { n, c, p, target, output } => {
            let r = commands::budget(n, c, p, target)?;
            let text = match output.format.unwrap_or(Format::Json) {
                Format::Csv => report::to_csv(&[r])?,
                Format::Json => report::to_json(&r)?,
            };
            emit(&output, &text)
        }
    }
}

fn render_rows<R: report::CsvRow>(rows: &[R], format: Format) -> Result<String> {
    match format {
        Format::Csv => report::to_csv(rows),
        Format::Json => report::to_json(rows),
    }
}
