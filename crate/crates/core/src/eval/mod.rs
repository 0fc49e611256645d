//! Evaluation harness: diacritic-stripped WER/CER, real-time factor and MOS
//! study management.

mod metrics;
mod mos;
mod rtf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use metrics::{
    char_error_rate, default_normalize, pair_by_id, score_corpus, word_error_rate, CorpusScore,
    ErrorRate, Metric, ScoreOptions, ScoredPair, UtteranceScore,
};
pub use mos::{
    aggregate_mos, build_pool, pool_id, rater_names, MosCell, MosStudy, PoolEntry, PoolItem,
    PoolSkip, Rating, DEFAULT_PER_RATER,
};
pub use rtf::{is_real_time, measure_rtf, real_time_factor, RtfError, RtfMeasurement};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("reference is empty after normalization")]
    EmptyReference,
    #[error("reference `{0}` is empty after normalization")]
    EmptyReferenceAt(String),
    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("study: {0}")]
    Study(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One row of the evaluation report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportCell {
    pub model: String,
    pub voice: String,
    pub wer: Option<f64>,
    pub cer: Option<f64>,
    pub rtf: Option<f64>,
    pub real_time: Option<bool>,
    pub n_utterances: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub cells: Vec<ReportCell>,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
