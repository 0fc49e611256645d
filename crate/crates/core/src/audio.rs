//! PCM16 waveforms and RIFF/WAV encoding.

use std::io::Cursor;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SUPPORTED_RATES: [u32; 3] = [16_000, 22_050, 44_100];

/// Amplitude treated as 0 dBFS.
pub const FULL_SCALE: f64 = i16::MAX as f64;

#[derive(Debug, Error)]
pub enum AudioError {
    #[error("unsupported sample rate {0} Hz (expected one of 16000, 22050, 44100)")]
    UnsupportedRate(u32),
    #[error("malformed WAV: {0}")]
    Malformed(String),
    #[error("expected 16-bit integer PCM, found {bits}-bit {format}")]
    NotPcm16 { bits: u16, format: String },
    #[error("expected mono audio, found {0} channels")]
    NotMono(u16),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Waveform {
    pub samples: Vec<i16>,
    pub sample_rate: u32,
}

pub fn check_rate(rate: u32) -> Result<u32, AudioError> {
    if SUPPORTED_RATES.contains(&rate) {
        Ok(rate)
    } else {
        Err(AudioError::UnsupportedRate(rate))
    }
}

impl Waveform {
    pub fn new(samples: Vec<i16>, sample_rate: u32) -> Result<Self, AudioError> {
        check_rate(sample_rate)?;
        Ok(Waveform {
            samples,
            sample_rate,
        })
    }

    pub fn silence(seconds: f64, sample_rate: u32) -> Result<Self, AudioError> {
        Waveform::new(vec![0; (seconds * sample_rate as f64).round() as usize], sample_rate)
    }

    /// Quantize floating-point samples in [-1, 1] (values outside are clipped).
    pub fn from_f32(samples: &[f32], sample_rate: u32) -> Result<Self, AudioError> {
        let pcm = samples
            .iter()
            .map(|&s| (s as f64 * FULL_SCALE).round().clamp(-FULL_SCALE, FULL_SCALE) as i16)
            .collect();
        Waveform::new(pcm, sample_rate)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    /// Sample index for a time, clamped to the waveform.
    pub fn index_at(&self, seconds: f64) -> usize {
        ((seconds * self.sample_rate as f64).round().max(0.0) as usize).min(self.samples.len())
    }

    pub fn slice_s(&self, start_s: f64, end_s: f64) -> Waveform {
        let (a, b) = (self.index_at(start_s), self.index_at(end_s));
        Waveform {
            samples: self.samples[a..b.max(a)].to_vec(),
            sample_rate: self.sample_rate,
        }
    }

    pub fn peak(&self) -> u16 {
        self.samples
            .iter()
            .map(|s| s.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// Peak level in dBFS (`-inf` for digital silence).
    pub fn peak_dbfs(&self) -> f64 {
        20.0 * (self.peak() as f64 / FULL_SCALE).log10()
    }

    pub fn to_wav_bytes(&self) -> Vec<u8> {
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: self.sample_rate,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut cursor = Cursor::new(Vec::with_capacity(44 + self.samples.len() * 2));
        {
            let mut w = hound::WavWriter::new(&mut cursor, spec).expect("in-memory writer");
            let mut w16 = w.get_i16_writer(self.samples.len() as u32);
            for &s in &self.samples {
                w16.write_sample(s);
            }
            w16.flush().expect("in-memory writer");
            w.finalize().expect("in-memory writer");
        }
        cursor.into_inner()
    }

    /// Decode a mono PCM16 WAV with a supported rate.
    pub fn from_wav_bytes(bytes: &[u8]) -> Result<Self, AudioError> {
        let (samples, spec) = decode(bytes)?;
        if spec.channels != 1 {
            return Err(AudioError::NotMono(spec.channels));
        }
        Waveform::new(samples, spec.sample_rate)
    }

    /// Read a PCM16 WAV file; multi-channel input is averaged to mono.
    pub fn read_wav(path: &Path) -> Result<Self, AudioError> {
        let bytes = std::fs::read(path)?;
        let (samples, spec) = decode(&bytes)?;
        let ch = spec.channels.max(1) as usize;
        let mono = if ch == 1 {
            samples
        } else {
            samples
                .chunks(ch)
                .map(|c| (c.iter().map(|&s| s as i32).sum::<i32>() / c.len() as i32) as i16)
                .collect()
        };
        Waveform::new(mono, spec.sample_rate)
    }

    pub fn write_wav(&self, path: &Path) -> Result<(), AudioError> {
        std::fs::write(path, self.to_wav_bytes())?;
        Ok(())
    }
}

fn decode(bytes: &[u8]) -> Result<(Vec<i16>, hound::WavSpec), AudioError> {
    let reader = hound::WavReader::new(Cursor::new(bytes))
        .map_err(|e| AudioError::Malformed(e.to_string()))?;
    let spec = reader.spec();
    if spec.bits_per_sample != 16 || spec.sample_format != hound::SampleFormat::Int {
        return Err(AudioError::NotPcm16 {
            bits: spec.bits_per_sample,
            format: format!("{:?}", spec.sample_format).to_lowercase(),
        });
    }
    let expected = reader.len() as usize;
    let samples = reader
        .into_samples::<i16>()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| AudioError::Malformed(e.to_string()))?;
    if samples.len() != expected {
        return Err(AudioError::Malformed(format!(
            "header declares {expected} samples, found {}",
            samples.len()
        )));
    }
    Ok((samples, spec))
}
