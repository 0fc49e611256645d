//! Two-stage synthesis contract: characters → 80-band mel spectrogram →
//! waveform, with a deterministic reference implementation and a client for
//! remote backends.

pub mod mel;
mod reference;
mod remote;
mod voice;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use reference::{encode, encode_with_stats, vocode, vocode_with, EncodeStats, ReferenceSynthesizer};
pub use remote::{RemoteSynthesizer, DEFAULT_TIMEOUT};
pub use voice::{Style, VoiceName, VoiceSpec, F0_RANGE};

use crate::audio::{check_rate, Waveform};
use crate::diacritizer::{validate_diacritization, DiacritizationSource, DiacritizedText};

pub const N_MELS: usize = 80;
pub const DEFAULT_RATE: u32 = 22_050;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("nothing to synthesize: {0}")]
    EmptyText(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("invalid mel spectrogram: {0}")]
    InvalidMel(String),
    #[error("synthesis backend timed out: {0}")]
    Timeout(String),
    #[error("synthesis backend unreachable: {0}")]
    Unreachable(String),
    #[error("synthesis backend returned HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("malformed audio from backend: {0}")]
    Malformed(String),
}

/// `frames[t][band]` holds non-negative energies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MelSpectrogram {
    #[serde(with = "frames_serde")]
    pub frames: Vec<[f32; N_MELS]>,
    pub frame_hop_s: f64,
    pub sample_rate: u32,
}

mod frames_serde {
    use super::N_MELS;
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(f: &[[f32; N_MELS]], s: S) -> Result<S::Ok, S::Error> {
        f.iter().map(|r| r.as_slice()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<[f32; N_MELS]>, D::Error> {
        let rows = Vec::<Vec<f32>>::deserialize(d)?;
        rows.into_iter()
            .map(|r| {
                let n = r.len();
                r.try_into()
                    .map_err(|_| D::Error::custom(format!("expected {N_MELS} mel bands, found {n}")))
            })
            .collect()
    }
}

impl MelSpectrogram {
    /// Build from rows of arbitrary width; rows must have exactly 80 bands.
    pub fn from_rows(
        rows: &[Vec<f32>],
        frame_hop_s: f64,
        sample_rate: u32,
    ) -> Result<Self, SynthError> {
        let frames = rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                <[f32; N_MELS]>::try_from(r.as_slice()).map_err(|_| {
                    SynthError::InvalidMel(format!(
                        "frame {i} has {} bands, expected {N_MELS}",
                        r.len()
                    ))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mel = MelSpectrogram {
            frames,
            frame_hop_s,
            sample_rate,
        };
        mel.check()?;
        Ok(mel)
    }

    pub fn n_frames(&self) -> usize {
        self.frames.len()
    }

    pub fn duration_s(&self) -> f64 {
        self.frames.len() as f64 * self.frame_hop_s
    }

    pub fn check(&self) -> Result<(), SynthError> {
        if self.frames.is_empty() {
            return Err(SynthError::InvalidMel("no frames".into()));
        }
        if !(self.frame_hop_s.is_finite() && self.frame_hop_s > 0.0) {
            return Err(SynthError::InvalidMel(format!(
                "frame hop {} s is not positive",
                self.frame_hop_s
            )));
        }
        check_rate(self.sample_rate).map_err(|e| SynthError::InvalidMel(e.to_string()))?;
        for (t, row) in self.frames.iter().enumerate() {
            if let Some(b) = row.iter().position(|v| !v.is_finite() || *v < 0.0) {
                return Err(SynthError::InvalidMel(format!(
                    "frame {t} band {b} holds {}",
                    row[b]
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisRequest {
    pub diacritized_text: DiacritizedText,
    pub voice: VoiceSpec,
    pub output_rate: u32,
}

impl SynthesisRequest {
    pub fn new(
        diacritized_text: DiacritizedText,
        voice: VoiceSpec,
        output_rate: u32,
    ) -> Result<Self, SynthError> {
        voice.check().map_err(SynthError::InvalidRequest)?;
        check_rate(output_rate).map_err(|e| SynthError::InvalidRequest(e.to_string()))?;
        let violations = validate_diacritization(&diacritized_text.content);
        if let Some(v) = violations.first() {
            return Err(SynthError::InvalidRequest(format!(
                "diacritization invalid at char {}: {:?}",
                v.offset, v.rule
            )));
        }
        Ok(SynthesisRequest {
            diacritized_text,
            voice,
            output_rate,
        })
    }

    /// Convenience constructor from vocalized text.
    pub fn from_text(text: &str, voice: VoiceSpec, output_rate: u32) -> Result<Self, SynthError> {
        let text = DiacritizedText::validated(text, DiacritizationSource::Passthrough)
            .map_err(|e| SynthError::InvalidRequest(e.to_string()))?;
        Self::new(text, voice, output_rate)
    }

    pub fn to_wire(&self) -> SynthesizeWire {
        let custom = matches!(self.voice.name, VoiceName::Custom(_));
        SynthesizeWire {
            text: self.diacritized_text.content.clone(),
            voice: self.voice.name.to_string(),
            rate: self.output_rate,
            style: custom.then_some(self.voice.style),
            base_f0: custom.then_some(self.voice.base_f0),
        }
    }
}

/// JSON body of `POST /synthesize`. `style` and `base_f0` are only sent for
/// custom voices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesizeWire {
    pub text: String,
    pub voice: String,
    #[serde(default = "default_rate")]
    pub rate: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub style: Option<Style>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_f0: Option<f64>,
}

fn default_rate() -> u32 {
    DEFAULT_RATE
}

impl SynthesizeWire {
    /// Resolve into a request; named voices go through `lookup`, inline
    /// custom parameters take precedence.
    pub fn into_request(
        self,
        lookup: impl Fn(&str) -> Option<VoiceSpec>,
    ) -> Result<SynthesisRequest, SynthError> {
        let voice = match (self.style, self.base_f0) {
            (Some(style), Some(f0)) if VoiceSpec::builtin(&self.voice).is_none() => {
                VoiceSpec::custom(&self.voice, style, f0).map_err(SynthError::InvalidRequest)?
            }
            _ => lookup(&self.voice).ok_or_else(|| {
                SynthError::InvalidRequest(format!("unknown voice `{}`", self.voice))
            })?,
        };
        SynthesisRequest::from_text(&self.text, voice, self.rate)
    }
}

/// Output of one synthesis call.
#[derive(Debug, Clone, PartialEq)]
pub struct Synthesis {
    pub waveform: Waveform,
    /// Wall-clock generation time in seconds.
    pub timing_s: f64,
    /// Characters the encoder could not voice (zero for remote backends).
    pub skipped_chars: usize,
}

pub trait Synthesizer: Send + Sync {
    fn name(&self) -> &str;
    fn synthesize(&self, req: &SynthesisRequest) -> Result<Synthesis, SynthError>;
}
