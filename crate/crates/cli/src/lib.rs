//! Command-line driver: every subcommand reads its inputs, writes its output
//! files plus `manifest.json` into `--out`, and prints a short summary.

pub mod commands;
pub mod daystate;
pub mod output;
pub mod pipeline;

use std::path::{Path, PathBuf};

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use coglab_core::ingest::{load_model_config, ModelConfig};
use coglab_core::ErrorKind;

use output::{write_outputs, Artifacts, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "coglab", version, about = "Cognitive market-state pipeline")]
pub struct Cli {
    /// Model configuration (TOML). Falls back to $COGLAB_CONFIG.
    #[arg(long, global = true, env = "COGLAB_CONFIG")]
    pub config: Option<PathBuf>,
    /// Seed for every random draw in the run.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Reject GARCH ranges outside the reference table.
    #[arg(long, global = true)]
    pub strict_ranges: bool,
    /// Report Sharpe ratios scaled by sqrt(252).
    #[arg(long, global = true)]
    pub annualize: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalize a directory of daily reports into a day-state table.
    Ingest(IngestArgs),
    /// Macro indices, dynamics and quadrant membership per day.
    Macro(MacroArgs),
    /// Forward simulation of cognitive state from a snapshot.
    Simulate(SimulateArgs),
    /// Strategy backtest against a price series.
    Backtest(BacktestArgs),
    /// Information coefficients of sentiment series against an index.
    Abtest(AbtestArgs),
    /// Per-metric JSD between two text corpora.
    Fingerprint(FingerprintArgs),
    /// Synthetic comments and token-distribution perturbation.
    Perturb(PerturbArgs),
    /// Fit decay, satellite or holiday parameters.
    Calibrate(CalibrateArgs),
    /// Check the configuration, and optionally a report directory.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    pub reports_dir: PathBuf,
    /// Accept dimension names missing from the registry.
    #[arg(long)]
    pub extensible: bool,
    /// Date for documents that carry none (YYYY-MM-DD).
    #[arg(long)]
    pub fallback_date: Option<String>,
}

#[derive(Debug, Args)]
pub struct MacroArgs {
    pub day_states: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub lag: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GarchModeArg {
    Dynamic,
    Static,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub day_states: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub horizon: usize,
    /// `DAY:CLASS`, e.g. `1:fear_inducing`. Repeatable.
    #[arg(long = "shock")]
    pub shocks: Vec<String>,
    /// Snapshot date; defaults to the last row.
    #[arg(long)]
    pub from: Option<String>,
    /// Starting conditional variance for every dimension.
    #[arg(long, default_value_t = 0.0)]
    pub h0: f64,
    #[arg(long, value_enum)]
    pub mode: Option<GarchModeArg>,
    /// Run this many consecutive seeds in parallel, one file each.
    #[arg(long)]
    pub sweep: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BacktestModeArg {
    Dynamic,
    Baseline,
    StaticGarch,
}

#[derive(Debug, Args)]
pub struct BacktestArgs {
    #[arg(long, required_unless_present = "drill")]
    pub prices: Option<PathBuf>,
    #[arg(long, required_unless_present = "drill")]
    pub states: Option<PathBuf>,
    /// Use the bundled synthetic crash scenario instead of input files.
    #[arg(long, conflicts_with_all = ["prices", "states"])]
    pub drill: bool,
    #[arg(long, value_enum, default_value = "dynamic")]
    pub mode: BacktestModeArg,
    /// Daily returns at or below this count as crash events.
    #[arg(long, default_value_t = -0.05, allow_hyphen_values = true)]
    pub crash_return: f64,
}

#[derive(Debug, Args)]
pub struct AbtestArgs {
    /// Index CSV (`key,value`).
    #[arg(long, required_unless_present = "bundled")]
    pub index: Option<PathBuf>,
    /// Sentiment CSVs (`key,value`), expected best first.
    #[arg(required_unless_present = "bundled")]
    pub models: Vec<PathBuf>,
    /// Use the bundled 2015 event-day sample.
    #[arg(long, conflicts_with_all = ["index", "models"])]
    pub bundled: bool,
}

#[derive(Debug, Args)]
pub struct FingerprintArgs {
    /// One text per line.
    pub corpus_a: PathBuf,
    pub corpus_b: PathBuf,
    /// Directory holding the lexicon files; bundled lexicons otherwise.
    #[arg(long)]
    pub lexicons: Option<PathBuf>,
    #[arg(long, default_value_t = coglab_core::textlab::DEFAULT_BINS)]
    pub bins: usize,
}

#[derive(Debug, Args)]
pub struct PerturbArgs {
    #[command(subcommand)]
    pub action: PerturbAction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConditionArg {
    Crash,
    Rally,
    Sideways,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    Tempered,
    Additive,
}

#[derive(Debug, Subcommand)]
pub enum PerturbAction {
    /// Generate a synthetic comment corpus.
    Generate {
        #[arg(long, default_value_t = 0.85)]
        i_rhythm: f64,
        #[arg(long, default_value_t = 0.2)]
        p_leap: f64,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, value_enum, default_value = "crash")]
        condition: ConditionArg,
        #[arg(long, default_value = "大盘")]
        event: String,
        /// Share of novice authors; the rest are veterans.
        #[arg(long, default_value_t = 0.6)]
        novice_share: f64,
        #[arg(long)]
        templates: Option<PathBuf>,
        #[arg(long)]
        slang: Option<PathBuf>,
        #[arg(long, default_value_t = coglab_core::textlab::DEFAULT_SLANG_PROBABILITY)]
        slang_p: f64,
    },
    /// Reshape a probability vector.
    Distribution {
        /// Comma-separated probabilities.
        #[arg(long, value_delimiter = ',', required = true)]
        probs: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        temperature: f64,
        #[arg(long, value_delimiter = ',')]
        mask: Vec<f64>,
        #[arg(long, value_enum, default_value = "tempered")]
        form: FormArg,
        #[arg(long, default_value_t = 0.0)]
        damping: f64,
        #[arg(long, default_value_t = 0.0)]
        noise_sd: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CalibrationTarget {
    Decay,
    Satellite,
    Holiday,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[arg(value_enum)]
    pub target: CalibrationTarget,
    /// decay: `e_t,elapsed,e_next`; satellite: `y,x,v_x,mcfi`; holiday: `group,value`.
    pub data: PathBuf,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub reports: Option<PathBuf>,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ingest(_) => "ingest",
            Command::Macro(_) => "macro",
            Command::Simulate(_) => "simulate",
            Command::Backtest(_) => "backtest",
            Command::Abtest(_) => "abtest",
            Command::Fingerprint(_) => "fingerprint",
            Command::Perturb(_) => "perturb",
            Command::Calibrate(_) => "calibrate",
            Command::Validate(_) => "validate",
        }
    }
}

/// Settings shared by every command.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub config: ModelConfig,
    pub config_path: Option<PathBuf>,
    pub seed: u64,
}

/// What a command produced: files for `--out`, the inputs it read, and a
/// human-readable summary.
#[derive(Debug, Default)]
pub struct Outcome {
    pub artifacts: Artifacts,
    pub inputs: Vec<PathBuf>,
    pub summary: String,
}

pub fn resolve_config(cli: &Cli) -> Result<ModelConfig> {
    let mut cfg = match &cli.config {
        Some(path) => load_model_config(path).map_err(|e| match e {
            coglab_core::Error::Io { path, source } => {
                coglab_core::Error::Config(format!("cannot read {}: {source}", path.display()))
            }
            other => other,
        })?,
        None => ModelConfig::default(),
    };
    cfg.strict_ranges |= cli.strict_ranges;
    cfg.backtest.annualize |= cli.annualize;
    cfg.validate()?;
    Ok(cfg)
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let ctx = RunContext {
        config: resolve_config(cli)?,
        config_path: cli.config.clone(),
        seed: cli.seed,
    };
    commands::dispatch(&cli.command, &ctx)
}

/// Runs the command and writes its outputs and manifest.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let outcome = execute(cli)?;
    let mut inputs = outcome.inputs.clone();
    if let Some(cfg) = &cli.config {
        inputs.insert(0, cfg.clone());
    }
    let manifest = RunManifest::new(
        cli.command.name(),
        cli.config.as_deref(),
        &inputs,
        cli.seed,
        &outcome.artifacts,
    )?;
    write_outputs(&cli.out, &outcome.artifacts, &manifest)?;
    Ok(outcome)
}

pub fn exit_code(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<coglab_core::Error>().map(|e| e.kind()) {
        Some(ErrorKind::Config) => EXIT_CONFIG,
        Some(ErrorKind::Numeric) => EXIT_NUMERIC,
        _ => EXIT_INPUT,
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| {
        coglab_core::Error::Io {
            path: path.to_path_buf(),
            source,
        }
        .into()
    })
}
