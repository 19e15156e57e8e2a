//! Scenario runner for the dpp solver kit.
//!
//! Exit codes: 0 success, 2 configuration error, 3 convergence failure,
//! 4 failed checks.

mod config;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::ScenarioConfig;
use scenario::{CliError, RunContext};

#[derive(Parser)]
#[command(name = "dpp", about = "Discrete dynamic programming equation solver kit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for artifacts.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Thread-pool size (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Build the domain, solve, verify and write artifacts.
    Run {
        #[command(flatten)]
        common: Common,
        /// Dump the iterate every K sweeps.
        #[arg(long)]
        snapshot_every: Option<usize>,
    },
    /// Rerun the scenario over a parameter ladder and tabulate one metric.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Parameter name: epsilon, exponent, lambda or drift.
        #[arg(long)]
        param: String,
        /// Comma-separated parameter values.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
    },
    /// Run the full verification matrix for the configured operator.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Write the domain point table (roles, layers, annuli).
    DumpDomain {
        #[command(flatten)]
        common: Common,
    },
}

fn load_config(path: &PathBuf) -> Result<ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn setup(common: &Common) -> Result<(ScenarioConfig, RunContext), CliError> {
    if let Some(n) = common.threads {
        // Ignored if a global pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let config = load_config(&common.config)?;
    let ctx = RunContext {
        out_dir: common.out.clone(),
        seed_override: common.seed,
        snapshot_every: None,
    };
    Ok((config, ctx))
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Run { common, snapshot_every } => {
            let (config, mut ctx) = setup(&common)?;
            ctx.snapshot_every = snapshot_every;
            scenario::run(&config, &ctx)
        }
        Command::Sweep { common, param, values } => {
            let (config, ctx) = setup(&common)?;
            if values.is_empty() {
                return Err(CliError::Config("sweep needs at least one value".into()));
            }
            scenario::sweep(&config, &param, &values, &ctx)
        }
        Command::Verify { common } => {
            let (config, ctx) = setup(&common)?;
            scenario::verify_only(&config, &ctx)
        }
        Command::DumpDomain { common } => {
            let (config, ctx) = setup(&common)?;
            scenario::dump_domain(&config, &ctx)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
