//! `extremal`: build minimizers, sweep phase diagrams and run certificates.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod output;

use config::{CommonArgs, ConfigError, Params};

/// Exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const IO: u8 = 1;
    pub const INVALID: u8 = 2;
    pub const PHENOMENON: u8 = 3;
    pub const INCONCLUSIVE: u8 = 4;
    pub const CERTIFICATE_FAILED: u8 = 5;
}

#[derive(Parser)]
#[command(name = "extremal", version, about = "Energy-minimal deformations of annuli and rectangles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Radial minimizer between two annuli.
    Radial {
        #[command(flatten)]
        common: CommonArgs,
        /// Also write the sampled map as `map.csv` on the `--grid` grid.
        #[arg(long)]
        emit_grid: bool,
    },
    /// Shear minimizer between rectangles `[0,ℓ]×[0,1]` and `[0,L]×[0,1]`.
    Grotzsch {
        #[command(flatten)]
        common: CommonArgs,
        /// Degenerate-sequence indices, `j=1..32` (doubling) or `1,2,4`.
        #[arg(long)]
        emit_degenerate: Option<String>,
    },
    /// Phase table over gauge parameters and length ratios `L/ℓ`.
    Phase {
        #[command(flatten)]
        common: CommonArgs,
        /// Gauge family swept over `--params`.
        #[arg(long)]
        family: Option<String>,
        /// Comma-separated gauge parameters.
        #[arg(long)]
        params: Option<String>,
        /// Comma-separated ratios `L/ℓ`.
        #[arg(long)]
        ratios: Option<String>,
    },
    /// Minimality certificate and invariant checks for a candidate map.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// `radial`, `power-stretch`, `grotzsch` or `file:path`.
        #[arg(long)]
        candidate: Option<String>,
    },
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Radial { common, emit_grid } => {
            let mut p = Params::load(&common)?;
            p.set_flag("emit-grid", emit_grid);
            commands::radial::run(&p)
        }
        Command::Grotzsch { common, emit_degenerate } => {
            let mut p = Params::load(&common)?;
            p.set_opt("emit-degenerate", emit_degenerate);
            commands::grotzsch::run(&p)
        }
        Command::Phase { common, family, params, ratios } => {
            let mut p = Params::load(&common)?;
            p.set_opt("family", family);
            p.set_opt("params", params);
            p.set_opt("ratios", ratios);
            commands::phase::run(&p)
        }
        Command::Verify { common, candidate } => {
            let mut p = Params::load(&common)?;
            p.set_opt("candidate", candidate);
            commands::verify::run(&p)
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<extremal_core::Error>() {
        return match e {
            extremal_core::Error::InconclusiveConvergence { .. } => exit::INCONCLUSIVE,
            _ => exit::INVALID,
        };
    }
    if err.downcast_ref::<ConfigError>().is_some() {
        return exit::INVALID;
    }
    exit::IO
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
