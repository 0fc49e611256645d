//! `natiq`: command-line front-end for every pipeline stage.
//!
//! Exit codes: 0 success, 1 input error, 2 internal error. Reports go to
//! stdout as JSON, logs to stderr.

mod audio;
mod eval;
mod text;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use natiq_service::{Pipeline, PipelineError, ServiceConfig};

/// Default seed for every randomized step.
pub const DEFAULT_SEED: u64 = 7;

#[derive(Parser)]
#[command(name = "natiq", version, about = "Arabic text-to-speech pipeline")]
struct Cli {
    /// `key = value` config file (same format as the service)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Log level for stderr (error, warn, info, debug)
    #[arg(long, global = true, default_value = "warn")]
    log: String,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Expand numbers, dates and abbreviations into words
    Normalize(text::NormalizeArgs),
    /// Add diacritics to normalized text
    Diacritize(text::DiacritizeArgs),
    /// Check diacritic placement; exits 1 when a line has violations
    Validate(text::ValidateArgs),
    /// Print sentence-boundary offsets of a transcript
    Boundaries(text::BoundariesArgs),
    /// Cut a long recording into sentence-aligned segments
    Segment(audio::SegmentArgs),
    /// Synthesize one WAV per input line or manifest row
    Synth(audio::SynthArgs),
    /// Run the HTTP service
    Serve(audio::ServeArgs),
    /// Score recognition output or measure real-time factor
    #[command(subcommand)]
    Eval(eval::EvalCmd),
    /// Manage a listening study
    #[command(subcommand)]
    Mos(eval::MosCmd),
}

/// A failed command, split by who is at fault.
#[derive(Debug)]
pub enum Failure {
    Input(anyhow::Error),
    Internal(anyhow::Error),
}

impl Failure {
    pub fn input(msg: impl std::fmt::Display) -> Self {
        Failure::Input(anyhow::anyhow!("{msg}"))
    }

    pub fn internal(msg: impl std::fmt::Display) -> Self {
        Failure::Internal(anyhow::anyhow!("{msg}"))
    }

    pub fn context(self, ctx: impl std::fmt::Display + Send + Sync + 'static) -> Self {
        match self {
            Failure::Input(e) => Failure::Input(e.context(ctx)),
            Failure::Internal(e) => Failure::Internal(e.context(ctx)),
        }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::BadInput(_) => Failure::input(e),
            PipelineError::Unavailable(_) | PipelineError::Internal(_) => Failure::internal(e),
        }
    }
}

pub type CmdResult<T = ()> = Result<T, Failure>;

/// Attach context and classify an error in one step.
pub trait Classify<T> {
    fn input_err(self, ctx: impl std::fmt::Display) -> CmdResult<T>;
    fn internal_err(self, ctx: impl std::fmt::Display) -> CmdResult<T>;
}

impl<T, E: std::fmt::Display> Classify<T> for Result<T, E> {
    fn input_err(self, ctx: impl std::fmt::Display) -> CmdResult<T> {
        self.map_err(|e| Failure::input(format!("{ctx}: {e}")))
    }

    fn internal_err(self, ctx: impl std::fmt::Display) -> CmdResult<T> {
        self.map_err(|e| Failure::internal(format!("{ctx}: {e}")))
    }
}

/// Read a UTF-8 file, dropping a leading BOM.
pub fn read_text(path: &Path) -> CmdResult<String> {
    let text = std::fs::read_to_string(path).input_err(path.display())?;
    Ok(text.strip_prefix('\u{feff}').unwrap_or(&text).to_string())
}

pub fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> CmdResult {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).internal_err(dir.display())?;
    }
    std::fs::write(path, bytes).internal_err(path.display())
}

pub fn print_json(value: &impl serde::Serialize) -> CmdResult {
    let s = serde_json::to_string_pretty(value).internal_err("serializing report")?;
    println!("{s}");
    Ok(())
}

/// Config file plus `NATIQ_*` overrides plus `key=value` flag overrides.
pub fn load_config(path: Option<&Path>, overrides: &[(&str, Option<String>)]) -> CmdResult<ServiceConfig> {
    let mut cfg = ServiceConfig::from_env(path).input_err("config")?;
    for (key, value) in overrides {
        if let Some(v) = value {
            cfg.set(key, v, "command line").input_err("flag")?;
        }
    }
    Ok(cfg)
}

pub fn pipeline(cfg: &ServiceConfig) -> CmdResult<Pipeline> {
    Pipeline::from_config(cfg).map_err(|e| Failure::input(format!("pipeline: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_new(&cli.log)
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("warn")),
        )
        .init();
    let config = cli.config.as_deref();
    let result = match cli.cmd {
        Cmd::Normalize(a) => text::normalize(config, a),
        Cmd::Diacritize(a) => text::diacritize(config, a),
        Cmd::Validate(a) => text::validate(a),
        Cmd::Boundaries(a) => text::boundaries(a),
        Cmd::Segment(a) => audio::segment(a),
        Cmd::Synth(a) => audio::synth(config, a),
        Cmd::Serve(a) => audio::serve(config, a),
        Cmd::Eval(c) => eval::eval(config, c),
        Cmd::Mos(c) => eval::mos(config, c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("internal error: {e:#}");
            ExitCode::from(2)
        }
    }
}
