//! The `minecraft` command-line tool.
//!
//! Every command reads a TOML config (a bundled default when `--config` is
//! absent), writes its outputs into `--out`, and records a `manifest.toml`
//! holding the effective config. Passing that manifest back as `--config`
//! reproduces the outputs byte for byte.
//!
//! Exit codes: 0 success, 2 config error, 3 numerical failure, 4 IO error.

mod commands;
pub mod output;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use commands::{
    changepoint_kernel, changepoint_profile, correlation_rows, CorrelationRow, FittedSeries,
    ImageModels, RegimeCoupling, BUNDLED_CONFIG_DIR, FULL_ITERATIONS, FULL_RESTARTS,
};

#[derive(Debug, Parser)]
#[command(
    name = "minecraft",
    version,
    about = "Multi-output spectral mixture kernels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML config, or a manifest written by a previous run.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the config's seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Use the full restart and iteration budgets instead of desk-scale ones.
    #[arg(long, global = true)]
    pub paper_scale: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Auto-, cross-spectra and coherence of a two-channel model.
    Coherence,
    /// Joint image samples of the target, block and Gaussian models.
    ImageDemo,
    /// Prior samples and standard deviation around a change point.
    ChangepointDemo,
    /// Change-point model fit to a time series, scored by SMSE.
    FitSeries,
    /// Kernel values over a set of lags.
    KernelEval,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Coherence => "coherence",
            Command::ImageDemo => "image-demo",
            Command::ChangepointDemo => "changepoint-demo",
            Command::FitSeries => "fit-series",
            Command::KernelEval => "kernel-eval",
        }
    }
}

/// Written next to every command's outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub seed: u64,
    pub version: String,
    pub outputs: Vec<String>,
    pub wall_time_seconds: f64,
    pub config: toml::Table,
}

pub const MANIFEST_NAME: &str = "manifest.toml";

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e.root() {
        Error::Config { .. } | Error::InvalidParameter(_) | Error::TooShort { .. } => 2,
        Error::Io { .. } | Error::Parse { .. } | Error::NonMonotoneTime { .. } => 4,
        _ => 3,
    }
}

/// Loads the raw config table for `command`. A manifest's embedded config is
/// unwrapped; relative paths are later resolved against `base`.
fn load_table(path: Option<&Path>, command: Command) -> Result<(toml::Table, PathBuf, String)> {
    let (text, origin, base) = match path {
        Some(p) => (
            std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?,
            p.display().to_string(),
            p.parent().map(Path::to_path_buf).unwrap_or_default(),
        ),
        None => {
            let (name, text) = commands::bundled(command);
            (
                text.to_string(),
                format!("<bundled {name}>"),
                PathBuf::from(BUNDLED_CONFIG_DIR),
            )
        }
    };
    let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config {
        path: origin.clone(),
        field: String::new(),
        message: e.message().to_string(),
    })?;
    if table.contains_key("command") && table.contains_key("config") {
        let recorded = table
            .get("command")
            .and_then(|v| v.as_str())
            .unwrap_or_default();
        if recorded != command.name() {
            return Err(Error::Config {
                path: origin,
                field: "command".into(),
                message: format!(
                    "manifest was written by `{recorded}`, not `{}`",
                    command.name()
                ),
            });
        }
        table = match table.remove("config") {
            Some(toml::Value::Table(t)) => t,
            _ => {
                return Err(Error::Config {
                    path: origin,
                    field: "config".into(),
                    message: "manifest config must be a table".into(),
                })
            }
        };
    }
    Ok((table, base, origin))
}

pub(crate) fn parse_table<T: DeserializeOwned>(table: toml::Table, origin: &str) -> Result<T> {
    serde_path_to_error::deserialize(toml::Value::Table(table)).map_err(|e| {
        let field = e.path().to_string();
        Error::Config {
            path: origin.to_string(),
            field: if field == "." { String::new() } else { field },
            message: e.into_inner().message().trim().to_string(),
        }
    })
}

pub(crate) fn to_table<T: Serialize>(value: &T) -> Result<toml::Table> {
    toml::Table::try_from(value).map_err(|e| Error::Config {
        path: String::new(),
        field: String::new(),
        message: e.to_string(),
    })
}

/// Inputs shared by every command.
pub(crate) struct Context {
    pub table: toml::Table,
    pub base: PathBuf,
    pub origin: String,
    pub seed: Option<u64>,
    pub out: PathBuf,
    pub paper_scale: bool,
}

/// What a command hands back for the manifest.
pub(crate) struct Finished {
    pub config: toml::Table,
    pub seed: u64,
    pub outputs: Vec<String>,
}

/// Runs one command and writes its manifest.
pub fn run(cli: &Cli) -> Result<RunManifest> {
    let started = Instant::now();
    let (table, base, origin) = load_table(cli.config.as_deref(), cli.command)?;
    std::fs::create_dir_all(&cli.out).map_err(|e| Error::io(&cli.out, e))?;
    let ctx = Context {
        table,
        base,
        origin,
        seed: cli.seed,
        out: cli.out.clone(),
        paper_scale: cli.paper_scale,
    };
    let done = match cli.command {
        Command::Coherence => commands::coherence(&ctx)?,
        Command::ImageDemo => commands::image_demo(&ctx)?,
        Command::ChangepointDemo => commands::changepoint_demo(&ctx)?,
        Command::FitSeries => commands::fit_series(&ctx)?,
        Command::KernelEval => commands::kernel_eval(&ctx)?,
    };
    let manifest = RunManifest {
        command: cli.command.name().to_string(),
        seed: done.seed,
        version: crate::VERSION.to_string(),
        outputs: done.outputs,
        wall_time_seconds: started.elapsed().as_secs_f64(),
        config: done.config,
    };
    let text = toml::to_string_pretty(&manifest).map_err(|e| Error::invalid(e.to_string()))?;
    output::write_atomic(&cli.out.join(MANIFEST_NAME), text.as_bytes())?;
    Ok(manifest)
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
