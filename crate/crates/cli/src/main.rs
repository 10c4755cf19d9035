//! `chronostim` command-line front-end.
//!
//! Every run writes a JSON sidecar holding its fully resolved arguments;
//! `chronostim --config <sidecar>` replays it.

mod args;
mod commands;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use args::*;
use chronostim::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "chronostim",
    version,
    about = "Arnold-tongue entrainment and chronotherapy toolkit",
    args_conflicts_with_subcommands = true
)]
struct Cli {
    /// Replay a run from its sidecar
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "snake_case")]
enum Command {
    Tongue(TongueArgs),
    Select(SelectArgs),
    Psd(PsdArgs),
    Simulate(SimulateArgs),
    Harness(HarnessArgs),
    Stats(StatsArgs),
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    tool: String,
    version: String,
    command: Command,
}

impl Command {
    fn resolve(&mut self) {
        match self {
            Command::Tongue(a) => a.resolve(),
            Command::Select(a) => a.resolve(),
            _ => {}
        }
    }

    /// Where the sidecar goes, if anywhere.
    fn sidecar_path(&self) -> Option<PathBuf> {
        let beside = |explicit: &Option<PathBuf>, primary: &Path| {
            Some(
                explicit
                    .clone()
                    .unwrap_or_else(|| commands::sibling(primary, "config.json")),
            )
        };
        match self {
            Command::Tongue(a) => beside(&a.sidecar, &a.out),
            Command::Select(a) => beside(&a.sidecar, &a.out),
            Command::Psd(a) => beside(&a.sidecar, &a.out),
            Command::Simulate(a) => beside(&a.sidecar, &a.log),
            Command::Harness(a) => beside(&a.sidecar, &a.out),
            Command::Stats(a) => match &a.out {
                Some(out) => beside(&a.sidecar, out),
                None => a.sidecar.clone(),
            },
        }
    }

    fn workers(&self) -> Option<usize> {
        match self {
            Command::Tongue(a) => a.workers,
            Command::Select(a) => a.workers,
            Command::Harness(a) => a.workers,
            _ => None,
        }
    }

    fn execute(&self) -> Result<()> {
        match self {
            Command::Tongue(a) => commands::tongue(a),
            Command::Select(a) => commands::select(a),
            Command::Psd(a) => commands::psd(a),
            Command::Simulate(a) => commands::simulate(a),
            Command::Harness(a) => commands::harness(a),
            Command::Stats(a) => commands::stats(a),
        }
    }
}

fn load_sidecar(path: &Path) -> Result<Command> {
    let file = std::fs::File::open(path)?;
    let sidecar: Sidecar = serde_json::from_reader(std::io::BufReader::new(file))?;
    Ok(sidecar.command)
}

fn run(cli: Cli) -> Result<()> {
    let mut command = match (cli.config, cli.command) {
        (Some(path), _) => load_sidecar(&path)?,
        (None, Some(c)) => c,
        (None, None) => return Err(Error::Config("no subcommand given (see --help)".into())),
    };
    command.resolve();

    let result = match command.workers() {
        Some(n) => rayon_pool(n)?.install(|| command.execute()),
        None => command.execute(),
    };
    result?;

    if let Some(path) = command.sidecar_path() {
        let sidecar = Sidecar {
            tool: "chronostim".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command,
        };
        commands::write_json(&path, &sidecar)?;
    }
    Ok(())
}

fn rayon_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("chronostim: {e}");
            ExitCode::from(if e.is_usage_error() { 2 } else { 1 })
        }
    }
}
