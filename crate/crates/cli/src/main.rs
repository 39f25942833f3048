//! `eomech` command-line front end.

mod commands;
mod manifest;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::table::Format;

#[derive(Parser, Debug)]
#[command(
    version,
    about = "Electro-optomechanical steady states, stability and Gaussian observables"
)]
struct Cli {
    /// JSON config; the built-in reference device when omitted
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file; stdout when omitted (no manifest is written then)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Worker threads for sweeps; never changes the output
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Also emit drift, diffusion and covariance matrices
    #[arg(long, global = true)]
    dump_matrices: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full analysis at one parameter point
    Point,
    /// Grid sweep from a named preset or explicit axes
    Sweep(SweepArgs),
    /// Time integration of the mean-field equations
    Dynamics(DynamicsArgs),
    /// Routh–Hurwitz terms and spectral abscissa of every steady branch
    Stability,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// fig2 … fig13
    #[arg(long)]
    preset: Option<String>,

    /// PARAM:START:STOP:COUNT, e.g. delta0w:-2e8:2e8:101 (values in SI units)
    #[arg(long = "axis")]
    axes: Vec<String>,

    /// Replace g2/g1 in every panel of the preset
    #[arg(long)]
    g2_ratio: Option<f64>,

    /// lowest-stable, all-stable, all, or a branch index
    #[arg(long)]
    branches: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DynamicsMode {
    Full,
    Adiabatic,
}

#[derive(Args, Debug)]
struct DynamicsArgs {
    /// Only fig2 carries a dynamics plan
    #[arg(long)]
    preset: Option<String>,

    /// End time in seconds
    #[arg(long, conflicts_with = "t_end_gamma")]
    t_end: Option<f64>,

    /// End time in units of 1/γm (default 5)
    #[arg(long)]
    t_end_gamma: Option<f64>,

    /// Number of output samples after t = 0
    #[arg(long, default_value_t = 1000)]
    samples: usize,

    #[arg(long, value_enum, default_value_t = DynamicsMode::Full)]
    mode: DynamicsMode,

    #[arg(long)]
    g2_ratio: Option<f64>,

    /// Relative integrator tolerance
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
