//! Command-line experiments for the spatial SIR model.

mod checks;
mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context as _, Result};
use clap::{Parser, Subcommand};

use crate::commands::Context;
use crate::config::Config;
use crate::output::{Manifest, Outputs};

#[derive(Parser, Debug)]
#[command(name = "spatial-sir", version, about = "Spatial SIR epidemics: constants, shapes, simulations and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flat `key = value` file with one `[section]` per command.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for replicate pools (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory (default: out/<command>).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Use the large-scale parameters (N = 1000, T = 1000). Slow.
    #[arg(long, global = true)]
    paper_scale: bool,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Table of survival probability, cone parameter and frontier levels.
    Solve,
    /// Limiting speed as a function of direction.
    Shape,
    /// One stochastic realization with field snapshots.
    Simulate,
    /// Deterministic limit, frontier layers and ultimate proportions.
    Det,
    /// Monte Carlo estimators (survival, delay, profile, layers).
    Montecarlo,
    /// Exact path counts against brute force, and rate-function growth.
    Paths,
    /// Percolation representation against the SIR recursion.
    PercolationCheck,
    /// Desk-scale invariant and oracle suite.
    Validate,
}

impl Command {
    const ALL: [Command; 8] = [
        Command::Solve,
        Command::Shape,
        Command::Simulate,
        Command::Det,
        Command::Montecarlo,
        Command::Paths,
        Command::PercolationCheck,
        Command::Validate,
    ];

    fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Shape => "shape",
            Command::Simulate => "simulate",
            Command::Det => "det",
            Command::Montecarlo => "montecarlo",
            Command::Paths => "paths",
            Command::PercolationCheck => "percolation-check",
            Command::Validate => "validate",
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let start = Instant::now();
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    for name in cfg.section_names() {
        if !Command::ALL.iter().any(|c| c.name() == name) {
            bail!("config section [{name}] does not name a command");
        }
    }
    let global = cfg.global();
    let cfg_seed = global.get("seed", 1u64)?;
    let cfg_threads: Option<usize> = global.opt("threads")?;
    let cfg_out = global.get("out", PathBuf::from("out").join(cli.command.name()))?;
    let seed = cli.seed.unwrap_or(cfg_seed);
    let threads = cli.threads.or(cfg_threads);
    let out_dir = cli.out.unwrap_or(cfg_out);
    global.finish()?;
    if let Some(t) = threads {
        if t == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().context("configuring the thread pool")?;
    }
    if cli.paper_scale {
        eprintln!("warning: --paper-scale uses N = 1000 and T = 1000; expect a long run and large outputs");
    }

    let ctx = Context { seed, paper_scale: cli.paper_scale };
    let section = cfg.section(cli.command.name());
    let mut outputs = Outputs::new(&out_dir)?;
    let ok = match cli.command {
        Command::Solve => commands::solve(&section, &ctx, &mut outputs)?,
        Command::Shape => commands::shape(&section, &ctx, &mut outputs)?,
        Command::Simulate => commands::simulate(&section, &ctx, &mut outputs)?,
        Command::Det => commands::det(&section, &ctx, &mut outputs)?,
        Command::Montecarlo => commands::montecarlo(&section, &ctx, &mut outputs)?,
        Command::Paths => commands::paths(&section, &ctx, &mut outputs)?,
        Command::PercolationCheck => commands::percolation_check(&section, &ctx, &mut outputs)?,
        Command::Validate => commands::validate(&section, &ctx, &mut outputs)?,
    };
    let manifest = Manifest {
        command: cli.command.name().to_string(),
        seed,
        threads: rayon::current_num_threads(),
        paper_scale: cli.paper_scale,
        config: cfg.echo(),
        wall_clock: start.elapsed(),
    };
    let path = manifest.write(&outputs)?;
    println!("wrote {} files and {}", outputs.files().len(), path.display());
    Ok(ok)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("some checks failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
