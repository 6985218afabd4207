use std::path::PathBuf;
use std::process;

use clap::{Args, Parser, Subcommand};
use timo_pigp_cli::commands::{
    cmd_identify, cmd_place, cmd_predict, cmd_simulate, cmd_study, RunOptions,
};
use timo_pigp_cli::{CliError, ExitCode, ExperimentConfig};

/// Caps the worker pool when set.
const THREADS_ENV: &str = "TIMO_PIGP_THREADS";

#[derive(Parser)]
#[command(
    name = "timo-pigp",
    version,
    about = "Physics-informed GP experiments on static Timoshenko beams"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Root seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Lift the enumeration and replication guards.
    #[arg(long)]
    full_scale: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize the configured datasets.
    Simulate(Common),
    /// Greedy sensor placement for every configured criterion.
    Place(Common),
    /// Sample the hyperparameter posterior.
    Identify {
        #[command(flatten)]
        common: Common,
        /// Dataset CSV files.
        #[arg(long, required = true, num_args = 1..)]
        data: Vec<PathBuf>,
        /// Also write the training covariance at the starting point.
        #[arg(long)]
        dump_kernel: bool,
    },
    /// Posterior-mixture predictions on the configured grids.
    Predict {
        #[command(flatten)]
        common: Common,
        /// Chain CSV written by `identify`.
        #[arg(long)]
        chain: PathBuf,
        #[arg(long, required = true, num_args = 1..)]
        data: Vec<PathBuf>,
    },
    /// Replicated identification sweep.
    Study(Common),
}

fn options(c: &Common) -> RunOptions {
    RunOptions {
        out: c.out.clone(),
        seed: c.seed,
        full_scale: c.full_scale,
        dump_kernel: false,
    }
}

fn init_pool() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        CliError::Config(format!(
            "{THREADS_ENV} must be a positive integer, got `{v}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot size the worker pool: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_pool()?;
    let common = match &cli.command {
        Command::Simulate(c) | Command::Place(c) | Command::Study(c) => c,
        Command::Identify { common, .. } | Command::Predict { common, .. } => common,
    };
    let cfg = ExperimentConfig::load(&common.config)?;
    let mut opts = options(common);
    let manifest = match &cli.command {
        Command::Simulate(_) => cmd_simulate(&cfg, &opts)?,
        Command::Place(_) => cmd_place(&cfg, &opts)?,
        Command::Study(_) => cmd_study(&cfg, &opts)?,
        Command::Identify {
            data, dump_kernel, ..
        } => {
            opts.dump_kernel = *dump_kernel;
            cmd_identify(&cfg, &opts, data)?
        }
        Command::Predict { chain, data, .. } => cmd_predict(&cfg, &opts, chain, data)?,
    };
    eprintln!(
        "wrote {} file(s) to {}",
        manifest.files.len(),
        opts.out.display()
    );
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        process::exit(e.exit_code() as i32);
    }
    process::exit(ExitCode::Success as i32);
}
