//! Mel scale, band layout and STFT mel analysis.
//!
//! Bands follow the HTK mel formula over 0–8000 Hz. At 22050 Hz the STFT
//! uses a 1024-point Hann window and a 256-sample hop; other rates scale
//! both so the hop stays ≈11.6 ms.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::{MelSpectrogram, N_MELS};
use crate::audio::{Waveform, FULL_SCALE};
use crate::par::Exec;

pub const F_MIN: f64 = 0.0;
pub const F_MAX: f64 = 8000.0;
pub const REFERENCE_RATE: u32 = 22_050;
pub const REFERENCE_N_FFT: usize = 1024;
pub const REFERENCE_HOP: usize = 256;

pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// `n_mels + 2` band edges equally spaced in mel.
fn edges(n_mels: usize) -> Vec<f64> {
    let (lo, hi) = (hz_to_mel(F_MIN), hz_to_mel(F_MAX));
    (0..n_mels + 2)
        .map(|i| mel_to_hz(lo + (hi - lo) * i as f64 / (n_mels + 1) as f64))
        .collect()
}

/// Center frequency of each of the 80 bands.
pub fn band_centers() -> [f64; N_MELS] {
    let e = edges(N_MELS);
    std::array::from_fn(|b| e[b + 1])
}

/// Band whose center is closest to `hz`.
pub fn nearest_band(hz: f64) -> usize {
    let centers = band_centers();
    let pos = centers.partition_point(|&c| c < hz);
    match pos {
        0 => 0,
        N_MELS => N_MELS - 1,
        p if (centers[p] - hz) < (hz - centers[p - 1]) => p,
        p => p - 1,
    }
}

/// Hop in samples for a rate, keeping the reference hop duration.
pub fn hop_samples(rate: u32) -> usize {
    (REFERENCE_HOP as f64 * rate as f64 / REFERENCE_RATE as f64).round() as usize
}

pub fn n_fft(rate: u32) -> usize {
    (REFERENCE_N_FFT as f64 * rate as f64 / REFERENCE_RATE as f64)
        .round()
        .max(2.0) as usize
}

/// Triangular mel filterbank over the positive FFT bins.
#[derive(Debug, Clone)]
pub struct MelFilterbank {
    /// `N_MELS` rows of `n_fft / 2 + 1` weights.
    weights: Vec<Vec<f32>>,
}

impl MelFilterbank {
    pub fn new(sample_rate: u32, n_fft: usize) -> Self {
        let n_bins = n_fft / 2 + 1;
        let e = edges(N_MELS);
        let bin_hz = |k: usize| k as f64 * sample_rate as f64 / n_fft as f64;
        let weights = (0..N_MELS)
            .map(|b| {
                let (lo, mid, hi) = (e[b], e[b + 1], e[b + 2]);
                (0..n_bins)
                    .map(|k| {
                        let f = bin_hz(k);
                        let w = if f <= lo || f >= hi {
                            0.0
                        } else if f <= mid {
                            (f - lo) / (mid - lo)
                        } else {
                            (hi - f) / (hi - mid)
                        };
                        w as f32
                    })
                    .collect()
            })
            .collect();
        MelFilterbank { weights }
    }

    pub fn apply(&self, power: &[f32]) -> [f32; N_MELS] {
        std::array::from_fn(|b| {
            self.weights[b]
                .iter()
                .zip(power)
                .map(|(w, p)| w * p)
                .sum()
        })
    }
}

/// Power mel spectrogram of a waveform (Hann window, centered frames).
pub fn analyze(w: &Waveform, exec: Exec) -> MelSpectrogram {
    let n_fft = n_fft(w.sample_rate);
    let hop = hop_samples(w.sample_rate);
    let bank = MelFilterbank::new(w.sample_rate, n_fft);
    let fft: Arc<dyn Fft<f32>> = FftPlanner::new().plan_fft_forward(n_fft);
    let window: Vec<f32> = (0..n_fft)
        .map(|i| {
            0.5 - 0.5 * (2.0 * std::f32::consts::PI * i as f32 / n_fft as f32).cos()
        })
        .collect();
    let n_frames = w.len() / hop + 1;
    let frames = exec.map_range(0..n_frames, |f| {
        let center = (f * hop) as isize;
        let mut buf: Vec<Complex<f32>> = (0..n_fft)
            .map(|i| {
                let idx = center - (n_fft / 2) as isize + i as isize;
                let s = if idx >= 0 && (idx as usize) < w.len() {
                    w.samples[idx as usize] as f32 / FULL_SCALE as f32
                } else {
                    0.0
                };
                Complex::new(s * window[i], 0.0)
            })
            .collect();
        fft.process(&mut buf);
        let power: Vec<f32> = buf[..n_fft / 2 + 1].iter().map(|c| c.norm_sqr()).collect();
        bank.apply(&power)
    });
    MelSpectrogram {
        frames,
        frame_hop_s: hop as f64 / w.sample_rate as f64,
        sample_rate: w.sample_rate,
    }
}
