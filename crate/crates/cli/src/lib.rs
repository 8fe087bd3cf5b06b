//! Command-line front end: argument parsing, dispatch, artifact output and
//! the run manifest.

pub mod args;
pub mod commands;
pub mod export;
pub mod output;

use std::io::Write;
use std::time::Instant;

use serde_json::Value;
use thiserror::Error;

use args::Cli;
use output::{append_manifest, ManifestEntry, Outcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_CHECK: i32 = 4;

pub const SEED_ENV: &str = "SHELLSPEC_SEED";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] cylbuck::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::Core(cylbuck::Error::Io(_)) => EXIT_IO,
            CliError::Core(cylbuck::Error::Validation(_)) => EXIT_CHECK,
            CliError::Core(e) if e.is_numerical() => EXIT_NUMERICAL,
            CliError::Core(_) => EXIT_USAGE,
        }
    }
}

/// The seed in effect: the environment wins over the flag.
pub fn effective_seed(flag: u64) -> Result<u64, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV}={s} is not an unsigned integer"))),
        Err(_) => Ok(flag),
    }
}

/// The parsed configuration with the effective seed, as embedded in outputs.
pub fn config_value(cli: &Cli) -> Value {
    serde_json::to_value(cli).expect("config serializes")
}

/// Run the command and render its output; artifacts and the manifest are
/// written when `--out` is set.
pub fn execute(cli: &Cli) -> Result<(Outcome, String), CliError> {
    let started = Instant::now();
    let config = config_value(cli);
    let mut outcome = commands::dispatch(&cli.command, cli.seed)?;
    let format = cli.format.unwrap_or(outcome.default_format);
    let text = outcome.render(format, &config);
    if let Some(dir) = &cli.out {
        let mut paths = outcome.write_artifacts(dir, cli.command.name(), &config)?;
        paths.extend(outcome.artifacts.iter().cloned());
        let entry = ManifestEntry {
            command: cli.command.name(),
            config: &config,
            artifacts: vec![],
            wall_time_s: started.elapsed().as_secs_f64(),
            exit_code: if outcome.failures.is_empty() {
                EXIT_OK
            } else {
                EXIT_CHECK
            },
            version: env!("CARGO_PKG_VERSION"),
            finished_unix_s: 0,
        };
        append_manifest(dir, entry, &paths)?;
        outcome.artifacts = paths;
    }
    Ok((outcome, text))
}

/// Entry point used by the binary; returns the process exit code.
pub fn run(mut cli: Cli) -> i32 {
    let code = (|| -> Result<i32, CliError> {
        cli.seed = effective_seed(cli.seed)?;
        if let Some(jobs) = cli.jobs {
            if jobs == 0 {
                return Err(CliError::Usage("--jobs must be positive".into()));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build_global()
                .map_err(|e| CliError::Usage(e.to_string()))?;
        }
        let (outcome, text) = execute(&cli)?;
        std::io::stdout().write_all(text.as_bytes())?;
        for f in &outcome.failures {
            eprintln!("check failed: {f}");
        }
        Ok(if outcome.failures.is_empty() {
            EXIT_OK
        } else {
            EXIT_CHECK
        })
    })();
    code.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    })
}
