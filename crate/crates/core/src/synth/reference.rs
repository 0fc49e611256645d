//! Deterministic character-driven reference synthesizer.
//!
//! Every character maps to a fixed-duration unit (vowel 90 ms, consonant
//! 60 ms, pause 120 ms, shadda repeats the preceding consonant). Voiced units
//! put harmonic energy at the mel bands nearest multiples of the voice's f0;
//! unvoiced units are broadband. The vocoder is a bank of 80 sinusoids, one
//! per band center, with per-frame amplitude interpolation. Nothing here
//! carries state across characters, so frame counts add up across texts.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use tracing::warn;

use super::mel::{band_centers, hop_samples, F_MAX};
use super::{MelSpectrogram, Style, Synthesis, SynthError, SynthesisRequest, Synthesizer, N_MELS};
use crate::audio::{Waveform, FULL_SCALE};
use crate::diacritizer::{
    is_harakah, DAMMA, DAMMATAN, FATHA, FATHATAN, KASRA, KASRATAN, SHADDA, SUKUN, TATWEEL,
};
use crate::normalizer::is_arabic_letter;
use crate::par::Exec;

pub const VOWEL_S: f64 = 0.090;
pub const CONSONANT_S: f64 = 0.060;
pub const PAUSE_S: f64 = 0.120;

/// Output peak after normalization (about -6 dBFS).
const OUTPUT_PEAK: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Vowel {
    A,
    I,
    U,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Sound {
    Vowel(Vowel),
    Voiced,
    Unvoiced,
    Pause,
}

#[derive(Debug, Clone, Copy)]
struct Unit {
    sound: Sound,
    dur_s: f64,
}

/// Per-request encoder bookkeeping.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EncodeStats {
    pub units: usize,
    pub skipped_chars: usize,
}

const UNVOICED: &str = "تثحخسشصطفقكهةء";
const PAUSES: &str = ".,،؛؟!?:;-–«»\"'()[]";

fn classify(c: char) -> Option<Sound> {
    match c {
        FATHA | FATHATAN => Some(Sound::Vowel(Vowel::A)),
        KASRA | KASRATAN => Some(Sound::Vowel(Vowel::I)),
        DAMMA | DAMMATAN => Some(Sound::Vowel(Vowel::U)),
        'ا' | 'آ' | 'ى' => Some(Sound::Vowel(Vowel::A)),
        c if c.is_whitespace() || PAUSES.contains(c) => Some(Sound::Pause),
        c if UNVOICED.contains(c) => Some(Sound::Unvoiced),
        c if is_arabic_letter(c) => Some(Sound::Voiced),
        _ => None,
    }
}

fn units(text: &str) -> (Vec<Unit>, EncodeStats) {
    let mut out: Vec<Unit> = Vec::new();
    let mut skipped = 0;
    let mut last_consonant: Option<Sound> = None;
    for c in text.chars() {
        match c {
            SUKUN | TATWEEL => continue,
            SHADDA => {
                match last_consonant {
                    Some(sound) => out.push(Unit {
                        sound,
                        dur_s: CONSONANT_S,
                    }),
                    None => skipped += 1,
                }
                continue;
            }
            _ => {}
        }
        let Some(sound) = classify(c) else {
            skipped += 1;
            continue;
        };
        let dur_s = match sound {
            Sound::Vowel(_) => VOWEL_S,
            Sound::Voiced | Sound::Unvoiced => CONSONANT_S,
            Sound::Pause => PAUSE_S,
        };
        // Short-vowel marks sit between a letter and its shadda in canonical
        // order, so they keep the consonant available for gemination.
        if !is_harakah(c) {
            last_consonant = matches!(sound, Sound::Voiced | Sound::Unvoiced).then_some(sound);
        }
        out.push(Unit { sound, dur_s });
    }
    let stats = EncodeStats {
        units: out.len(),
        skipped_chars: skipped,
    };
    (out, stats)
}

fn formants(v: Vowel) -> [f64; 2] {
    match v {
        Vowel::A => [700.0, 1200.0],
        Vowel::I => [300.0, 2300.0],
        Vowel::U => [320.0, 800.0],
    }
}

fn f0_at(req: &SynthesisRequest, t: f64) -> f64 {
    let base = req.voice.base_f0;
    match req.voice.style {
        Style::Neutral => base,
        Style::Expressive => base * (1.0 + 0.15 * (2.0 * PI * t / 1.2).sin()),
    }
}

fn harmonic_frame(f0: f64, gain: f64, vowel: Option<Vowel>, centers: &[f64; N_MELS]) -> [f32; N_MELS] {
    let mut frame = [0f32; N_MELS];
    let mut k = 1;
    while k as f64 * f0 <= F_MAX {
        let f = k as f64 * f0;
        let shape = match vowel {
            Some(v) => {
                let env: f64 = formants(v)
                    .iter()
                    .map(|fc| (-(f - fc).powi(2) / (2.0 * 200f64.powi(2))).exp())
                    .sum();
                0.3 + 0.7 * env.min(1.0)
            }
            None => 1.0,
        };
        let amp = gain * shape / k as f64;
        let band = nearest(centers, f);
        frame[band] += (amp * amp) as f32;
        k += 1;
    }
    frame
}

fn nearest(centers: &[f64; N_MELS], hz: f64) -> usize {
    let pos = centers.partition_point(|&c| c < hz);
    match pos {
        0 => 0,
        N_MELS => N_MELS - 1,
        p if centers[p] - hz < hz - centers[p - 1] => p,
        p => p - 1,
    }
}

/// Characters → mel spectrogram.
pub fn encode(req: &SynthesisRequest) -> Result<MelSpectrogram, SynthError> {
    encode_with_stats(req).map(|(mel, _)| mel)
}

pub fn encode_with_stats(req: &SynthesisRequest) -> Result<(MelSpectrogram, EncodeStats), SynthError> {
    let text = &req.diacritized_text.content;
    if text.trim().is_empty() {
        return Err(SynthError::EmptyText("empty text".into()));
    }
    let (units, stats) = units(text);
    if units.is_empty() {
        return Err(SynthError::EmptyText(format!(
            "no speakable characters among {} input characters",
            text.chars().count()
        )));
    }
    if stats.skipped_chars > 0 {
        warn!(skipped = stats.skipped_chars, "encoder skipped unknown characters");
    }
    let hop = hop_samples(req.output_rate);
    let hop_s = hop as f64 / req.output_rate as f64;
    let mut ends = Vec::with_capacity(units.len());
    let mut total = 0.0;
    for u in &units {
        total += u.dur_s;
        ends.push(total);
    }
    // Guard against 0.15 / hop landing a hair above an integer.
    let n_frames = ((total / hop_s) - 1e-9).ceil().max(1.0) as usize;
    let centers = band_centers();
    let frames = (0..n_frames)
        .map(|i| {
            let t = (i as f64 + 0.5) * hop_s;
            let idx = ends.partition_point(|&e| e <= t).min(units.len() - 1);
            match units[idx].sound {
                Sound::Pause => [0f32; N_MELS],
                Sound::Unvoiced => [0.02f32; N_MELS],
                Sound::Voiced => harmonic_frame(f0_at(req, t), 0.4, None, &centers),
                Sound::Vowel(v) => harmonic_frame(f0_at(req, t), 1.0, Some(v), &centers),
            }
        })
        .collect();
    let mel = MelSpectrogram {
        frames,
        frame_hop_s: hop_s,
        sample_rate: req.output_rate,
    };
    Ok((mel, stats))
}

/// Mel spectrogram → waveform using the default execution mode.
pub fn vocode(mel: &MelSpectrogram) -> Result<Waveform, SynthError> {
    vocode_with(mel, Exec::default())
}

pub fn vocode_with(mel: &MelSpectrogram, exec: Exec) -> Result<Waveform, SynthError> {
    mel.check()?;
    let rate = mel.sample_rate as f64;
    let hop = (mel.frame_hop_s * rate).round().max(1.0) as usize;
    let n_frames = mel.frames.len();
    let centers = band_centers();
    let amps: Vec<[f64; N_MELS]> = mel
        .frames
        .iter()
        .map(|f| std::array::from_fn(|b| (f[b] as f64).sqrt()))
        .collect();
    let mut out = vec![0f64; n_frames * hop];
    exec.for_each_chunk_mut(&mut out, hop, |fi, chunk| {
        let a0 = &amps[fi];
        let a1 = &amps[(fi + 1).min(n_frames - 1)];
        let start = (fi * hop) as f64;
        for b in 0..N_MELS {
            if a0[b] == 0.0 && a1[b] == 0.0 {
                continue;
            }
            let cycles = centers[b] * start / rate;
            let phase = 2.0 * PI * (cycles - cycles.floor());
            let step = 2.0 * PI * centers[b] / rate;
            let (mut s, mut c) = phase.sin_cos();
            let (ds, dc) = step.sin_cos();
            for (j, y) in chunk.iter_mut().enumerate() {
                let frac = j as f64 / hop as f64;
                *y += (a0[b] + (a1[b] - a0[b]) * frac) * s;
                (s, c) = (s * dc + c * ds, c * dc - s * ds);
            }
        }
    });
    let peak = out.iter().fold(0f64, |m, v| m.max(v.abs()));
    let gain = if peak > 1e-12 { OUTPUT_PEAK / peak } else { 0.0 };
    let samples = out
        .iter()
        .map(|v| (v * gain * FULL_SCALE).round().clamp(-FULL_SCALE, FULL_SCALE) as i16)
        .collect();
    Waveform::new(samples, mel.sample_rate).map_err(|e| SynthError::InvalidMel(e.to_string()))
}

/// Stateless reference synthesizer. `delay` is slept between the two stages
/// to emulate a slower acoustic model when benchmarking RTF.
#[derive(Debug, Clone, Copy, Default)]
pub struct ReferenceSynthesizer {
    pub delay: Duration,
    pub exec: Exec,
}

impl ReferenceSynthesizer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_delay(mut self, delay: Duration) -> Self {
        self.delay = delay;
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }
}

impl Synthesizer for ReferenceSynthesizer {
    fn name(&self) -> &str {
        "reference"
    }

    fn synthesize(&self, req: &SynthesisRequest) -> Result<Synthesis, SynthError> {
        let started = Instant::now();
        let (mel, stats) = encode_with_stats(req)?;
        if !self.delay.is_zero() {
            std::thread::sleep(self.delay);
        }
        let waveform = vocode_with(&mel, self.exec)?;
        Ok(Synthesis {
            waveform,
            timing_s: started.elapsed().as_secs_f64(),
            skipped_chars: stats.skipped_chars,
        })
    }
}
