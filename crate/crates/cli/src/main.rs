use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod config;

#[derive(Parser, Debug)]
#[command(
    name = "walkforge",
    version,
    about = "Synthesize and simulate inhomogeneous quantum and random walks on the line",
    args_override_self = true
)]
struct Cli {
    /// key = value file supplying default flags (command-line flags win)
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

const SUBCOMMANDS: &[&str] = &["validate", "synth", "evolve", "mc", "hadamard", "roundtrip", "figure"];

#[derive(Subcommand, Debug)]
enum Command {
    /// Check whether a target can be realized by a nearest-neighbour walk
    Validate {
        #[command(flatten)]
        target: TargetArgs,
        /// additive slack in |J| <= rho + tol
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Coin angles or jump probabilities that realize a target
    Synth {
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long, value_enum)]
        walk: Walk,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact forward evolution of a schedule
    Evolve {
        #[arg(long, value_enum)]
        walk: Walk,
        #[arg(long, value_name = "PATH")]
        schedule: PathBuf,
        /// initial chirality a,b of the quantum walker
        #[arg(long, value_name = "A,B", default_value = "1,0")]
        init: String,
        /// steps to evolve (defaults to the schedule length)
        #[arg(short = 'T', long = "horizon")]
        horizon: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo estimate of a jump schedule's density
    Mc {
        #[arg(long, value_name = "PATH")]
        schedule: PathBuf,
        #[arg(short = 'N', long = "trajectories", default_value_t = 10_000)]
        trajectories: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'T', long = "horizon")]
        horizon: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Homogeneous walk on the complex plane
    Hadamard {
        #[command(flatten)]
        coin: CoinArgs,
        #[arg(short = 'T', long = "horizon")]
        horizon: usize,
        #[command(flatten)]
        engine: EngineArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Synthesize, evolve, and compare against the target
    Roundtrip {
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long, value_enum, default_value_t = Walk::Qw)]
        walk: Walk,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Exact and Monte Carlo series behind the published figures
    Figure {
        #[arg(value_enum)]
        which: Figure,
        #[arg(short = 'N', long = "trajectories", default_value_t = 10_000)]
        trajectories: u64,
        #[arg(long, default_value_t = 20_160_601)]
        seed: u64,
        #[arg(short = 'T', long = "horizon", default_value_t = 30)]
        horizon: usize,
        /// directory for the CSV (stdout otherwise)
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct TargetArgs {
    /// uniform | binomial:p | hadamard:theta,eta,gamma[,alpha,beta,chi] | file:path
    #[arg(long)]
    target: String,
    /// horizon; file targets default to their full length
    #[arg(short = 'T', long = "horizon")]
    horizon: Option<usize>,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// directory for output files (stdout otherwise)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
    format: OutFormat,
}

#[derive(Args, Debug)]
struct CoinArgs {
    #[arg(long, allow_hyphen_values = true)]
    theta: f64,
    #[arg(long, allow_hyphen_values = true)]
    eta: f64,
    #[arg(long, allow_hyphen_values = true)]
    gamma: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    chi: f64,
}

#[derive(Args, Debug)]
#[group(multiple = false)]
struct EngineArgs {
    #[arg(long)]
    closed_form: bool,
    #[arg(long)]
    recursion: bool,
    /// large-t envelope on the last slice
    #[arg(long)]
    asymptotic: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Walk {
    Qw,
    Rw,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Figure {
    Fig1,
    Fig2,
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("WALKFORGE_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| anyhow::anyhow!("WALKFORGE_THREADS must be a non-negative integer, got '{raw}'"))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match config::expand_args(std::env::args().collect(), SUBCOMMANDS) {
        Ok(args) => args,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(args);
    // already spliced into the arguments
    debug_assert!(cli.config.is_none());
    let result = configure_threads().and_then(|()| commands::run(cli.command));
    match result {
        Ok(status) => status.into(),
        Err(e) if closed_stdout(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Output piped into a reader that quit early, e.g. `| head`.
fn closed_stdout(e: &anyhow::Error) -> bool {
    e.chain().any(|cause| {
        let io = cause
            .downcast_ref::<std::io::Error>()
            .or_else(|| match cause.downcast_ref::<walkforge::Error>() {
                Some(walkforge::Error::Io(io)) => Some(io),
                _ => None,
            });
        io.is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
    })
}
