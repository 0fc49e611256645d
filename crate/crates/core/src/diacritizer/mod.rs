//! Short-vowel restoration through a pluggable backend, diacritic
//! validation and stripping, and the transcript review workflow.

mod backend;
mod marks;
mod review;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use tracing::warn;

pub use backend::{
    BackendError, DiacritizeRequest, DiacritizeResponse, DiacritizerBackend, EchoBackend,
    HttpBackend, TableBackend,
};
pub use marks::{
    canonical_order, has_diacritics, is_harakah, strip_diacritics, validate_diacritization, Rule,
    Violation, DAMMA, DAMMATAN, FATHA, FATHATAN, KASRA, KASRATAN, SHADDA, SUKUN, TATWEEL,
};
pub use review::{
    apply_reviews, match_transcript, read_jsonl, write_jsonl, ReviewError, ReviewReason,
    ReviewRecord,
};

use crate::normalizer::{is_digit, NormalizedText};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiacritizationSource {
    Backend,
    ManualReview,
    Passthrough,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiacritizedText {
    pub content: String,
    pub source: DiacritizationSource,
}

impl DiacritizedText {
    /// Accept already-vocalized text after canonical reordering; fails if any
    /// placement rule is violated.
    pub fn validated(
        content: &str,
        source: DiacritizationSource,
    ) -> Result<Self, DiacritizeError> {
        let content = canonical_order(content);
        let violations = validate_diacritization(&content);
        if !violations.is_empty() {
            return Err(DiacritizeError::Invalid(violations));
        }
        Ok(DiacritizedText { content, source })
    }

    pub fn skeleton(&self) -> String {
        strip_diacritics(&self.content)
    }
}

/// What to do when the backend fails or returns unusable output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FailurePolicy {
    /// Return the error.
    Fail,
    /// Return the input unchanged with `source = passthrough`.
    #[default]
    Passthrough,
}

impl std::str::FromStr for FailurePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fail" => Ok(FailurePolicy::Fail),
            "passthrough" => Ok(FailurePolicy::Passthrough),
            other => Err(format!("unknown policy `{other}` (expected fail or passthrough)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum DiacritizeError {
    #[error("input contains digits; normalize it first")]
    NotNormalized,
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("backend changed the letters: expected `{expected}`, got `{got}`")]
    SkeletonMismatch { expected: String, got: String },
    #[error("invalid diacritization: {0:?}")]
    Invalid(Vec<Violation>),
}

impl DiacritizeError {
    /// Whether the failure is on the backend side (as opposed to bad input).
    pub fn is_backend_failure(&self) -> bool {
        !matches!(self, DiacritizeError::NotNormalized)
    }
}

/// Vocalize normalized text through `backend`.
pub fn diacritize(
    text: &NormalizedText,
    backend: &dyn DiacritizerBackend,
    policy: FailurePolicy,
) -> Result<DiacritizedText, DiacritizeError> {
    diacritize_str(&text.text, backend, policy)
}

pub fn diacritize_str(
    text: &str,
    backend: &dyn DiacritizerBackend,
    policy: FailurePolicy,
) -> Result<DiacritizedText, DiacritizeError> {
    if text.chars().any(is_digit) {
        return Err(DiacritizeError::NotNormalized);
    }
    if text.trim().is_empty() {
        return Ok(DiacritizedText {
            content: text.to_string(),
            source: DiacritizationSource::Backend,
        });
    }
    let attempt = backend
        .diacritize(text)
        .map_err(DiacritizeError::from)
        .and_then(|out| {
            let result = DiacritizedText::validated(&out, DiacritizationSource::Backend)?;
            let expected = strip_diacritics(text);
            if result.skeleton() != expected {
                return Err(DiacritizeError::SkeletonMismatch {
                    expected,
                    got: result.skeleton(),
                });
            }
            Ok(result)
        });
    match (attempt, policy) {
        (Ok(r), _) => Ok(r),
        (Err(e), FailurePolicy::Fail) => Err(e),
        (Err(e), FailurePolicy::Passthrough) => {
            warn!(backend = backend.name(), "diacritizer failed, passing text through: {e}");
            Ok(DiacritizedText {
                content: text.to_string(),
                source: DiacritizationSource::Passthrough,
            })
        }
    }
}
