use std::sync::Arc;
use std::time::{Duration, Instant};

use super::{Synthesis, SynthError, SynthesisRequest, Synthesizer};
use crate::audio::Waveform;
use crate::net::{self, HttpError, Limiter};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

/// Client for a backend speaking `POST /synthesize {text, voice, rate}` and
/// answering with a mono PCM16 WAV. Clones share the in-flight limit.
#[derive(Debug, Clone)]
pub struct RemoteSynthesizer {
    url: String,
    timeout: Duration,
    agent: ureq::Agent,
    limiter: Arc<Limiter>,
}

impl RemoteSynthesizer {
    pub fn new(base_url: &str, timeout: Duration, max_in_flight: usize) -> Self {
        RemoteSynthesizer {
            url: net::endpoint(base_url, "/synthesize"),
            timeout,
            agent: net::agent(timeout),
            limiter: Arc::new(Limiter::new(max_in_flight)),
        }
    }

    pub fn url(&self) -> &str {
        &self.url
    }

    pub fn in_flight(&self) -> usize {
        self.limiter.in_flight()
    }
}

impl From<HttpError> for SynthError {
    fn from(e: HttpError) -> Self {
        match e {
            HttpError::Timeout { .. } => SynthError::Timeout(e.to_string()),
            HttpError::Unreachable { .. } => SynthError::Unreachable(e.to_string()),
            HttpError::Status { status, body, .. } => SynthError::Http { status, body },
            HttpError::Body { .. } => SynthError::Malformed(e.to_string()),
        }
    }
}

impl Synthesizer for RemoteSynthesizer {
    fn name(&self) -> &str {
        &self.url
    }

    fn synthesize(&self, req: &SynthesisRequest) -> Result<Synthesis, SynthError> {
        let _permit = self.limiter.acquire();
        let started = Instant::now();
        let body = serde_json::to_value(req.to_wire()).expect("wire request serializes");
        let bytes = net::post_json(&self.agent, &self.url, self.timeout, &body)?;
        if bytes.len() < 12 || &bytes[..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
            return Err(SynthError::Malformed("response is not a RIFF/WAVE body".into()));
        }
        let waveform =
            Waveform::from_wav_bytes(&bytes).map_err(|e| SynthError::Malformed(e.to_string()))?;
        if waveform.sample_rate != req.output_rate {
            return Err(SynthError::Malformed(format!(
                "requested {} Hz, backend returned {} Hz",
                req.output_rate, waveform.sample_rate
            )));
        }
        Ok(Synthesis {
            waveform,
            timing_s: started.elapsed().as_secs_f64(),
            skipped_chars: 0,
        })
    }
}
