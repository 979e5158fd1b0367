//! Command-line runner: one JSON config per run, CSV and JSON artifacts out.
//!
//! Exit codes: 0 when every asserted invariant holds, 1 when one fails (a
//! `failures.json` report is written), 2 for unusable configs or arguments.

pub mod commands;
pub mod config;
pub mod output;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::config::{Context, ExperimentConfig};
use crate::output::{write_json, Outcome};

#[derive(Debug, Parser)]
#[command(name = "ergodix", version, about = "Ergodic averages on operator systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    pub threads: Option<usize>,
    /// RNG seed; overrides the config's `seed`.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Følner windows, translation defects and Tempelman ratios.
    Folner(CommonArgs),
    /// Ergodic averages and weak-mixing statistics.
    Mix(CommonArgs),
    /// Higher-order mixing defect and γ-sequence.
    Higher(CommonArgs),
    /// Van der Corput harness on a vector sequence.
    Vdc(CommonArgs),
    /// Orbit nets, return-time sets and compact-system recurrence.
    Compact(CommonArgs),
    /// GNS/Koopman splitting and the weak-mixing/compact dichotomy.
    Split(CommonArgs),
    /// Multiple-recurrence averages on either backend.
    Szemeredi(CommonArgs),
    /// Randomized property suites.
    Invariants(CommonArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Folner(_) => "folner",
            Command::Mix(_) => "mix",
            Command::Higher(_) => "higher",
            Command::Vdc(_) => "vdc",
            Command::Compact(_) => "compact",
            Command::Split(_) => "split",
            Command::Szemeredi(_) => "szemeredi",
            Command::Invariants(_) => "invariants",
        }
    }

    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Folner(a)
            | Command::Mix(a)
            | Command::Higher(a)
            | Command::Vdc(a)
            | Command::Compact(a)
            | Command::Split(a)
            | Command::Szemeredi(a)
            | Command::Invariants(a) => a,
        }
    }
}

/// A config, argument or I/O problem; maps to exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl From<ergodix::Error> for ConfigError {
    fn from(e: ergodix::Error) -> Self {
        ConfigError(e.to_string())
    }
}

impl From<serde_json::Error> for ConfigError {
    fn from(e: serde_json::Error) -> Self {
        ConfigError(format!("config: {e}"))
    }
}

pub fn config_error<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVARIANT: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;

/// Runs one subcommand and returns the process exit code.
pub fn run(cli: &Cli) -> u8 {
    let args = cli.command.args();
    match execute(&cli.command) {
        Ok(outcome) => match finish(cli.command.name(), &args.out, &outcome) {
            Ok(paths) => {
                for p in &paths {
                    println!("wrote {}", p.display());
                }
                if outcome.failures.is_empty() {
                    EXIT_OK
                } else {
                    for f in &outcome.failures {
                        eprintln!("invariant failed: {f}");
                    }
                    EXIT_INVARIANT
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_CONFIG
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

/// Loads the config and computes the subcommand's artifacts without writing them.
pub fn execute(command: &Command) -> Result<Outcome, ConfigError> {
    let args = command.args();
    let text = fs::read_to_string(&args.config)
        .map_err(|e| ConfigError(format!("cannot read {}: {e}", args.config.display())))?;
    let config = ExperimentConfig::parse(&text)?;
    let threads = match args.threads {
        Some(0) => return config_error("--threads must be at least 1"),
        Some(k) => k,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| ConfigError(format!("thread pool: {e}")))?;
    let seed = args.seed.or(config.seed);
    pool.install(|| {
        let ctx = Context::new(config, seed)?;
        commands::dispatch(command, &ctx)
    })
}

fn finish(name: &str, out: &Path, outcome: &Outcome) -> Result<Vec<PathBuf>, ConfigError> {
    fs::create_dir_all(out).map_err(|e| ConfigError(format!("cannot create {}: {e}", out.display())))?;
    let mut written = Vec::new();
    for artifact in &outcome.artifacts {
        let path = out.join(&artifact.file);
        fs::write(&path, &artifact.contents)
            .map_err(|e| ConfigError(format!("cannot write {}: {e}", path.display())))?;
        written.push(path);
    }
    if !outcome.failures.is_empty() {
        let report = json!({
            "schema": ergodix::SCHEMA,
            "subcommand": name,
            "failures": outcome.failures,
        });
        let path = out.join("failures.json");
        fs::write(&path, write_json(&report))
            .map_err(|e| ConfigError(format!("cannot write {}: {e}", path.display())))?;
        written.push(path);
    }
    Ok(written)
}
