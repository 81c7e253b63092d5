//! `honesty`: gate-set generation, honest approximation, gadget simulation and reports.

mod commands;
mod manifest;
mod params;

use clap::{Parser, Subcommand};
use honesty::approx::Family;
use honesty::physics::{ModelKind, Recipe};
use honesty::Error;
use std::path::PathBuf;
use std::process::ExitCode;

const DEFAULT_SAMPLES: usize = 10_000;
const PAPER_SAMPLES: usize = 1_000_000;

#[derive(Parser)]
#[command(name = "honesty", version, about = "Honest Pauli and Clifford approximations of noisy gate sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a noisy gate set from a physical model.
    GenGateset {
        #[arg(long)]
        model: ModelKind,
        /// Model parameters, TOML or JSON.
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        recipe: Recipe,
        #[arg(long)]
        out: PathBuf,
        /// Gate duration in seconds (recipe default otherwise).
        #[arg(long)]
        duration: Option<f64>,
        /// Integration step in seconds (recipe default otherwise).
        #[arg(long)]
        dt: Option<f64>,
        /// Directory of `<GATE>.json` control schedules for the external recipe.
        #[arg(long)]
        schedules: Option<PathBuf>,
    },
    /// Replace every gate error by its twirl or honest approximation.
    Approximate {
        #[arg(long)]
        gateset: PathBuf,
        #[arg(long)]
        family: Family,
        #[arg(long, default_value_t = 72)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Logical channel of one error-correction round for each gate-set variant.
    Gadget {
        #[arg(long, num_args = 1.., required = true)]
        gatesets: Vec<PathBuf>,
        #[arg(long, default_value = "perfect5")]
        code: String,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long)]
        paper_n: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-gate statistics, optionally against a reference gate set.
    GateStats {
        #[arg(long)]
        gateset: PathBuf,
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long)]
        paper_n: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stabilizer Monte Carlo of the gadget under a Pauli or Clifford fault model.
    Sample {
        #[arg(long)]
        gateset: PathBuf,
        #[arg(long, default_value = "perfect5")]
        code: String,
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Infeasible { .. } => 3,
        Error::NonConvergence { .. } => 4,
        _ => 2,
    }
}

fn samples(n: usize, paper: bool) -> usize {
    if paper {
        PAPER_SAMPLES
    } else {
        n
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::GenGateset { model, params, recipe, out, duration, dt, schedules } => commands::gen_gateset(commands::GenArgs {
            model,
            params: &params,
            recipe,
            out: &out,
            duration,
            dt,
            schedules: schedules.as_deref(),
        }),
        Command::Approximate { gateset, family, starts, seed, out } => commands::approximate(&gateset, family, starts, seed, &out),
        Command::Gadget { gatesets, code, samples: n, paper_n, seed, out } => commands::gadget(&gatesets, &code, samples(n, paper_n), seed, &out),
        Command::GateStats { gateset, reference, samples: n, paper_n, seed, out } => {
            commands::gate_stats(&gateset, reference.as_deref(), samples(n, paper_n), seed, out.as_deref())
        }
        Command::Sample { gateset, code, shots, seed, out } => commands::sample(&gateset, &code, shots, seed, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
