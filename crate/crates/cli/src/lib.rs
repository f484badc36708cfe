//! Argument parsing and command dispatch for the `voi` binary.
//!
//! Exit codes: 0 on success, 1 on any input or configuration error, 2 when a
//! comparison matrix fails the consistency rule.

mod commands;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use voi_core::ahp::AhpError;
use voi_core::config::ConfigError;
use voi_core::scheduler::SchedulerError;
use voi_core::sweep::SweepError;
use voi_core::voi::ProcessingMode;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INCONSISTENT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "voi",
    version,
    about = "Value-of-information assessment for shared perception records"
)]
pub struct Cli {
    /// JSON configuration with named profiles, scenarios, sensors and defaults.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Priority weights and consistency of comparison matrices.
    Weights(WeightsArgs),
    /// VoI of a single record at a single receiver.
    Assess(AssessArgs),
    /// Write a parameter sweep as CSV.
    Sweep(SweepArgs),
    /// Rank a batch of records and decide which to transmit.
    Schedule(ScheduleArgs),
    /// List the built-in figure presets.
    Presets(PresetsArgs),
}

#[derive(Debug, Args)]
pub struct WeightsArgs {
    /// Profile names to report; defaults to `safety` and `traffic`.
    #[arg(long = "profile", value_name = "NAME", conflicts_with = "matrix")]
    pub profiles: Vec<String>,
    /// JSON matrix file: `{"labels": [...], "upper": [...]}` or `{"labels": [...], "entries": [[...]]}`.
    #[arg(long, value_name = "PATH")]
    pub matrix: Option<PathBuf>,
    /// Print a JSON report instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Processed,
    Nonprocessed,
}

impl From<ModeArg> for ProcessingMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Processed => ProcessingMode::Processed,
            ModeArg::Nonprocessed => ProcessingMode::NonProcessed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TemporalArg {
    Static,
    Variable,
    Dynamic,
}

#[derive(Debug, Args)]
pub struct AssessArgs {
    #[arg(long, default_value = "safety")]
    pub profile: String,
    #[arg(long, default_value = "urban")]
    pub scenario: String,
    #[arg(long, default_value = "medium")]
    pub sensor: String,
    /// TX-RX distance (m).
    #[arg(long, allow_negative_numbers = true)]
    pub distance: f64,
    /// Age of information (s).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub aoi: f64,
    /// Temporal decay rate (1/s); overrides `--temporal`.
    #[arg(long, allow_negative_numbers = true)]
    pub ptd: Option<f64>,
    #[arg(long, value_enum, default_value = "variable")]
    pub temporal: TemporalArg,
    #[arg(long, value_enum, default_value = "processed")]
    pub mode: ModeArg,
    /// TX-to-object distance (m); half the TX-RX distance when omitted.
    #[arg(long, allow_negative_numbers = true)]
    pub obs_distance: Option<f64>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Built-in preset name (see `voi presets`).
    #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
    pub figure: Option<String>,
    /// JSON sweep definition, e.g. an edited `voi presets --show <name>`.
    #[arg(long, value_name = "PATH")]
    pub spec: Option<PathBuf>,
    /// Output CSV path; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScheduleArgs {
    /// Record file, one JSON object per line.
    #[arg(long, value_name = "PATH")]
    pub records: PathBuf,
    /// Receiver file, one JSON object per line.
    #[arg(long, value_name = "PATH")]
    pub receivers: PathBuf,
    #[arg(long, default_value = "safety")]
    pub profile: String,
    /// Transmission threshold in [0, 1]; falls back to the config default.
    #[arg(long, allow_negative_numbers = true)]
    pub threshold: Option<f64>,
    /// Scoring time (s); the latest record generation time when omitted.
    #[arg(long, allow_negative_numbers = true)]
    pub now: Option<f64>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PresetsArgs {
    /// Print the full JSON definition of one preset.
    #[arg(long, value_name = "NAME")]
    pub show: Option<String>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Ahp(#[from] AhpError),
    #[error(transparent)]
    Sweep(#[from] SweepError),
    #[error(transparent)]
    Scheduler(#[from] SchedulerError),
    #[error("{path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

/// Parses `args` (including the program name) and runs the command, writing
/// to the given streams. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match commands::dispatch(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}
