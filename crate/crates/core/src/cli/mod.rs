//! Command-line front end.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::estimator::Method;
use crate::stats::default_partitions;
use config::{RawConfig, RunConfig};

/// Exit status 0 is success; the variants map to 1, 2 and 3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Validation(String),
    Runtime(String),
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid configuration: {m}"),
            CliError::Runtime(m) => write!(f, "runtime error: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Oracle,
    Residual,
    Harmonicity,
    Decay,
    All,
}

impl Suite {
    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::Oracle => "oracle",
            Suite::Residual => "residual",
            Suite::Harmonicity => "harmonicity",
            Suite::Decay => "decay",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "wavewalk", version, about = "Monte Carlo wave-equation solver on bounded domains")]
pub struct Cli {
    /// Run configuration (`key = value` lines, or a previous CSV/JSON output).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Override a configuration key; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,

    /// Worker threads. Results do not depend on this, only on `partitions`.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate u(t, x) on the configured grid.
    Eval,
    /// Run verification checks.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
    /// Reproduce the worked example e^y cos s on (-1, 1).
    ReproducePaper {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        n: u64,
        #[arg(long, default_value = "mixed")]
        method: Method,
        #[arg(long)]
        partitions: Option<usize>,
        /// Also write the table as JSON.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut raw = match &cli.config {
        Some(path) => RawConfig::from_file(path).map_err(|e| CliError::Validation(e.to_string()))?,
        None => RawConfig::new(),
    };
    for s in &cli.set {
        raw.set(s).map_err(|e| CliError::Validation(e.to_string()))?;
    }
    RunConfig::resolve(&raw).map_err(|e| CliError::Validation(e.to_string()))
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Eval => commands::cmd_eval(&load_config(cli)?),
        Command::Verify { suite } => commands::cmd_verify(&load_config(cli)?, *suite),
        Command::ReproducePaper { seed, n, method, partitions, output } => {
            if !cli.set.is_empty() || cli.config.is_some() {
                return Err(CliError::Validation("reproduce-paper takes no configuration".into()));
            }
            let partitions = partitions.unwrap_or_else(default_partitions);
            if partitions == 0 {
                return Err(CliError::Validation("partitions must be ≥ 1".into()));
            }
            commands::cmd_reproduce_paper(*seed, *n, *method, partitions, output.as_deref())
        }
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = match cli.threads {
        Some(0) => Err(CliError::Validation("threads must be ≥ 1".into())),
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| dispatch(cli)),
            Err(e) => Err(CliError::Runtime(format!("cannot start thread pool: {e}"))),
        },
        None => dispatch(cli),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("wavewalk: {e}");
            e.exit_code()
        }
    }
}

/// Parses `args` (program name first) and runs.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            code
        }
    }
}
