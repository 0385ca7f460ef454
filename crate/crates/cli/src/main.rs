//! `cocycle-lab`: runs experiments from a JSON config and writes CSV series
//! and JSON certificates.
//!
//! Exit status: 0 on success, 1 on errors, 3 when `scheme` or `irregular`
//! stops because the measures share their top exponent, 4 when `verify`
//! finds failing criteria.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;
use sha2::{Digest, Sha256};

use commands::Status;
use config::ExperimentConfig;
use output::{Format, Output};

#[derive(Parser)]
#[command(name = "cocycle-lab", version, about = "Lyapunov-irregular points of matrix cocycles over shifts")]
struct Cli {
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides the config node budget.
    #[arg(long = "budget-nodes", global = true)]
    budget_nodes: Option<u64>,
    /// Format of series outputs; certificates are always JSON.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Finite-time exponents (and optionally spectra) along orbits.
    Mle,
    /// Subadditive tables a_n/n of integrated log-norms per measure.
    MeasureMle,
    /// Build a scheme, construct its point and check the checkpoints.
    Irregular,
    /// Full-mode scheme with its entropy and ball-mass certificates.
    Scheme,
    /// Topological, Bowen-Hausdorff, packing and local entropy estimates.
    Entropy,
    /// Run the acceptance checks over the built-in fixtures.
    Verify {
        /// Criterion ids to run (default: all).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("COCYCLE_LAB_THREADS") {
        let n: usize = v.parse().ok().filter(|&n| n > 0).ok_or_else(|| anyhow!("COCYCLE_LAB_THREADS must be a positive integer, got {v:?}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    }
    Ok(())
}

fn load(cli: &Cli) -> Result<ExperimentConfig> {
    let path = cli.config.as_ref().ok_or_else(|| anyhow!("--config is required for this command"))?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(b) = cli.budget_nodes {
        cfg.budget_nodes = b;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<Status> {
    init_threads()?;
    if let Command::Verify { only } = &cli.command {
        let key = serde_json::to_vec(&json!({ "command": "verify", "only": only }))?;
        let out = Output::new(&cli.out, "verify", format!("{:x}", Sha256::digest(&key)), cli.format)?;
        return commands::verify(only, &out);
    }
    let cfg = load(cli)?;
    let name = match cli.command {
        Command::Mle => "mle",
        Command::MeasureMle => "measure-mle",
        Command::Irregular => "irregular",
        Command::Scheme => "scheme",
        Command::Entropy => "entropy",
        Command::Verify { .. } => unreachable!(),
    };
    let out = Output::new(&cli.out, name, cfg.sha256(), cli.format)?;
    match cli.command {
        Command::Mle => commands::mle(&cfg, &out),
        Command::MeasureMle => commands::measure_mle(&cfg, &out),
        Command::Irregular => commands::irregular(&cfg, &out),
        Command::Scheme => commands::scheme(&cfg, &out),
        Command::Entropy => commands::entropy(&cfg, &out),
        Command::Verify { .. } => unreachable!(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Status::Done) => ExitCode::SUCCESS,
        Ok(Status::SharedMle) => ExitCode::from(3),
        Ok(Status::Failed) => ExitCode::from(4),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
