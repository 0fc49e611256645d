use std::collections::HashMap;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::marks::strip_diacritics;
use crate::net::{self, HttpError, Limiter};
use crate::normalizer::is_arabic_letter;

#[derive(Debug, Error)]
pub enum BackendError {
    #[error(transparent)]
    Http(#[from] HttpError),
    #[error("malformed backend response: {0}")]
    Protocol(String),
    #[error("backend unavailable: {0}")]
    Unavailable(String),
}

/// Restores short vowels on digit-free Arabic text.
pub trait DiacritizerBackend: Send + Sync {
    fn name(&self) -> &str;
    fn diacritize(&self, text: &str) -> Result<String, BackendError>;
}

/// Returns its input unchanged.
#[derive(Debug, Default, Clone, Copy)]
pub struct EchoBackend;

impl DiacritizerBackend for EchoBackend {
    fn name(&self) -> &str {
        "echo"
    }

    fn diacritize(&self, text: &str) -> Result<String, BackendError> {
        Ok(text.to_string())
    }
}

/// Deterministic word-table diacritizer: each Arabic word whose skeleton is
/// in the table is replaced by the stored vocalized form; everything else is
/// copied through.
#[derive(Debug, Default, Clone)]
pub struct TableBackend {
    table: HashMap<String, String>,
}

impl TableBackend {
    pub fn new(entries: impl IntoIterator<Item = (String, String)>) -> Self {
        TableBackend {
            table: entries
                .into_iter()
                .map(|(w, d)| (strip_diacritics(&w), d))
                .collect(),
        }
    }

    /// `word<TAB>diacritized` per line; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, BackendError> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (w, d) = line.split_once('\t').ok_or_else(|| {
                BackendError::Protocol(format!("table line {}: expected word<TAB>form", i + 1))
            })?;
            if strip_diacritics(w.trim()) != strip_diacritics(d.trim()) {
                return Err(BackendError::Protocol(format!(
                    "table line {}: `{}` does not vocalize `{}`",
                    i + 1,
                    d.trim(),
                    w.trim()
                )));
            }
            entries.push((w.trim().to_string(), d.trim().to_string()));
        }
        Ok(Self::new(entries))
    }

    pub fn load(path: &Path) -> Result<Self, BackendError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BackendError::Unavailable(format!("{}: {e}", path.display())))?;
        Self::parse(text.trim_start_matches('\u{feff}'))
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

impl DiacritizerBackend for TableBackend {
    fn name(&self) -> &str {
        "table"
    }

    fn diacritize(&self, text: &str) -> Result<String, BackendError> {
        let mut out = String::with_capacity(text.len() * 2);
        let mut word = String::new();
        let flush = |word: &mut String, out: &mut String| {
            if word.is_empty() {
                return;
            }
            match self.table.get(&strip_diacritics(word)) {
                Some(d) => out.push_str(d),
                None => out.push_str(word),
            }
            word.clear();
        };
        for c in text.chars() {
            if is_arabic_letter(c) {
                word.push(c);
            } else {
                flush(&mut word, &mut out);
                out.push(c);
            }
        }
        flush(&mut word, &mut out);
        Ok(out)
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DiacritizeRequest {
    pub text: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DiacritizeResponse {
    pub diacritized: String,
}

/// Client for an external diacritization service speaking
/// `POST /diacritize {"text"} → {"diacritized"}`.
#[derive(Debug)]
pub struct HttpBackend {
    url: String,
    timeout: Duration,
    agent: ureq::Agent,
    limiter: Limiter,
}

impl HttpBackend {
    pub fn new(base_url: &str, timeout: Duration, max_in_flight: usize) -> Self {
        HttpBackend {
            url: net::endpoint(base_url, "/diacritize"),
            timeout,
            agent: net::agent(timeout),
            limiter: Limiter::new(max_in_flight),
        }
    }

    pub fn url(&self) -> &str {
        &self.url
    }
}

impl DiacritizerBackend for HttpBackend {
    fn name(&self) -> &str {
        &self.url
    }

    fn diacritize(&self, text: &str) -> Result<String, BackendError> {
        let _permit = self.limiter.acquire();
        let body = serde_json::json!({ "text": text });
        let bytes = net::post_json(&self.agent, &self.url, self.timeout, &body)?;
        let resp: DiacritizeResponse = serde_json::from_slice(&bytes)
            .map_err(|e| BackendError::Protocol(e.to_string()))?;
        Ok(resp.diacritized)
    }
}
