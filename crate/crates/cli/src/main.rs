use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qmsdeco_cli::{AnalyzeArgs, CheckArgs, CliError, DecotimeArgs, SimulateArgs, Suite};

#[derive(Parser)]
#[command(name = "qms-deco", version, about = "Decoherence-free structure and decoherence times of quantum Markov semigroups")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full analysis report as JSON.
    Analyze {
        model: PathBuf,
        /// Number of optimizer starts for the log-Sobolev estimate.
        #[arg(long, default_value_t = 32)]
        budget: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decay curves of a trajectory as CSV.
    Simulate {
        model: PathBuf,
        /// mixed, plus, random, basis:K, an inline [[[re,im],..],..] matrix, or a JSON file.
        #[arg(long, default_value = "random")]
        rho: String,
        #[arg(long)]
        tmax: Option<f64>,
        #[arg(long, default_value_t = 64)]
        points: usize,
        /// Rate used for the log-Sobolev bound column; estimated when absent.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 32)]
        budget: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decoherence times and bound times, one row per dimension.
    Decotime {
        model: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        /// Comma-separated dimensions (deco builder only).
        #[arg(long, value_delimiter = ',')]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 32)]
        budget: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Invariant suites; exits with 3 when a check fails.
    Check {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 8)]
        budget: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn configure_threads() {
    if let Some(n) = std::env::var("QMS_DECO_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let seed = cli.seed;
    match cli.command {
        Command::Analyze { model, budget, out } => {
            qmsdeco_cli::cmd_analyze(&AnalyzeArgs { model, seed, budget, out }).map(|_| ())
        }
        Command::Simulate { model, rho, tmax, points, alpha, budget, out } => {
            qmsdeco_cli::cmd_simulate(&SimulateArgs { model, rho, tmax, points, alpha, seed, budget, out })
        }
        Command::Decotime { model, epsilon, dims, budget, out } => {
            qmsdeco_cli::cmd_decotime(&DecotimeArgs { model, epsilon, dims, seed, budget, out }).map(|_| ())
        }
        Command::Check { model, suite, samples, budget, out } => {
            qmsdeco_cli::cmd_check(&CheckArgs { model, suite, seed, samples, budget, out }).map(|_| ())
        }
    }
}

fn main() -> ExitCode {
    configure_threads();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qms-deco: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
