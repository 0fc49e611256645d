//! normalize → diacritize → synthesize, built from a [`ServiceConfig`]. The
//! CLI uses the same type so both produce identical audio.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use natiq_core::diacritizer::{
    diacritize_str, DiacritizeError, DiacritizedText, DiacritizerBackend, EchoBackend,
    FailurePolicy, HttpBackend, TableBackend,
};
use natiq_core::normalizer::{normalize_str, Agreement, Case, NormalizedText, NormalizerConfig};
use natiq_core::synth::{
    ReferenceSynthesizer, RemoteSynthesizer, SynthError, Synthesis, SynthesisRequest, Synthesizer,
    VoiceSpec,
};
use serde::Serialize;
use thiserror::Error;

use crate::config::{DiacritizerChoice, ServiceConfig, SynthChoice};

#[derive(Debug, Error)]
pub enum PipelineError {
    /// Caller error (HTTP 400).
    #[error("{0}")]
    BadInput(String),
    /// A backend could not serve the request (HTTP 503).
    #[error("{0}")]
    Unavailable(String),
    #[error("{0}")]
    Internal(String),
}

impl From<SynthError> for PipelineError {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::EmptyText(_) | SynthError::InvalidRequest(_) => {
                PipelineError::BadInput(e.to_string())
            }
            SynthError::InvalidMel(_) => PipelineError::Internal(e.to_string()),
            SynthError::Timeout(_)
            | SynthError::Unreachable(_)
            | SynthError::Http { .. }
            | SynthError::Malformed(_) => PipelineError::Unavailable(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Preview {
    pub normalized: NormalizedText,
    pub diacritized: DiacritizedText,
    pub normalize_s: f64,
    pub diacritize_s: f64,
}

pub struct Pipeline {
    pub normalizer: NormalizerConfig,
    pub diacritizer: Arc<dyn DiacritizerBackend>,
    pub policy: FailurePolicy,
    pub synthesizer: Arc<dyn Synthesizer>,
    pub voices: BTreeMap<String, VoiceSpec>,
    pub output_rate: u32,
    pub max_text_chars: usize,
}

impl Pipeline {
    pub fn from_config(cfg: &ServiceConfig) -> Result<Self, PipelineError> {
        let diacritizer: Arc<dyn DiacritizerBackend> = match &cfg.diacritizer {
            DiacritizerChoice::Echo => Arc::new(EchoBackend),
            DiacritizerChoice::Table(path) => Arc::new(
                TableBackend::load(path).map_err(|e| PipelineError::Internal(e.to_string()))?,
            ),
            DiacritizerChoice::Http(url) => Arc::new(HttpBackend::new(
                url,
                cfg.backend_timeout,
                cfg.max_in_flight,
            )),
        };
        let synthesizer: Arc<dyn Synthesizer> = match &cfg.synthesizer {
            SynthChoice::Reference => {
                Arc::new(ReferenceSynthesizer::new().with_delay(cfg.synth_delay))
            }
            SynthChoice::Remote(url) => Arc::new(RemoteSynthesizer::new(
                url,
                cfg.backend_timeout,
                cfg.max_in_flight,
            )),
        };
        let normalizer = NormalizerConfig {
            agreement: Agreement {
                gender: cfg.gender,
                case: Case::AccusativeGenitive,
            },
            months: cfg.months,
            ..NormalizerConfig::default()
        };
        Ok(Pipeline {
            normalizer,
            diacritizer,
            policy: cfg.failure_policy,
            synthesizer,
            voices: cfg.voices.clone(),
            output_rate: cfg.output_rate,
            max_text_chars: cfg.max_text_chars,
        })
    }

    pub fn check_text(&self, text: &str) -> Result<(), PipelineError> {
        if text.trim().is_empty() {
            return Err(PipelineError::BadInput("text is empty".into()));
        }
        let n = text.chars().count();
        if n > self.max_text_chars {
            return Err(PipelineError::BadInput(format!(
                "text has {n} characters; the limit is {}",
                self.max_text_chars
            )));
        }
        Ok(())
    }

    pub fn voice(&self, name: &str) -> Result<&VoiceSpec, PipelineError> {
        self.voices.get(name).ok_or_else(|| {
            PipelineError::BadInput(format!(
                "unknown voice `{name}` (available: {})",
                self.voices.keys().cloned().collect::<Vec<_>>().join(", ")
            ))
        })
    }

    pub fn normalize(&self, text: &str) -> NormalizedText {
        normalize_str(text, &self.normalizer)
    }

    pub fn diacritize(&self, normalized: &str) -> Result<DiacritizedText, PipelineError> {
        diacritize_str(normalized, self.diacritizer.as_ref(), self.policy).map_err(|e| match e {
            DiacritizeError::NotNormalized => PipelineError::BadInput(e.to_string()),
            e => PipelineError::Unavailable(format!("diacritizer: {e}")),
        })
    }

    /// Normalize and diacritize, timing both stages.
    pub fn preview(&self, text: &str) -> Result<Preview, PipelineError> {
        self.check_text(text)?;
        let t0 = Instant::now();
        let normalized = self.normalize(text);
        let normalize_s = t0.elapsed().as_secs_f64();
        let t1 = Instant::now();
        let diacritized = self.diacritize(&normalized.text)?;
        let diacritize_s = t1.elapsed().as_secs_f64();
        Ok(Preview {
            normalized,
            diacritized,
            normalize_s,
            diacritize_s,
        })
    }

    pub fn synthesize(
        &self,
        diacritized: &DiacritizedText,
        voice: &str,
    ) -> Result<Synthesis, PipelineError> {
        let voice = self.voice(voice)?.clone();
        let req = SynthesisRequest::new(diacritized.clone(), voice, self.output_rate)?;
        Ok(self.synthesizer.synthesize(&req)?)
    }

    /// The whole chain in one call.
    pub fn run(&self, text: &str, voice: &str) -> Result<(Preview, Synthesis), PipelineError> {
        self.voice(voice)?;
        let preview = self.preview(text)?;
        let synthesis = self.synthesize(&preview.diacritized, voice)?;
        Ok((preview, synthesis))
    }
}
