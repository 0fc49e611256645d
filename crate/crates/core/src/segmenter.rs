//! Corpus segmentation at silence boundaries, silence reduction and peak
//! loudness normalization.
//!
//! Silences come from a windowed RMS detector (25 ms windows, 10 ms hop).
//! Segments are only cut at silences the caller has paired with a sentence
//! boundary in the transcript, accumulating greedily toward a target mean
//! duration.

use serde::{Deserialize, Serialize};
use thiserror::Error;
use tracing::warn;

use crate::audio::{Waveform, FULL_SCALE};
use crate::par::Exec;

pub const WINDOW_S: f64 = 0.025;
pub const HOP_S: f64 = 0.010;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SilenceSpan {
    pub start_s: f64,
    pub end_s: f64,
}

impl SilenceSpan {
    pub fn duration_s(&self) -> f64 {
        self.end_s - self.start_s
    }

    pub fn midpoint_s(&self) -> f64 {
        (self.start_s + self.end_s) / 2.0
    }
}

/// Pairs a detected silence with a sentence boundary in the transcript.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Boundary {
    pub silence_index: usize,
    /// Character offset in the transcript where the next sentence starts.
    pub char_offset: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SegmentConfig {
    pub target_mean_s: f64,
    pub max_duration_s: f64,
    pub id_prefix: String,
}

impl Default for SegmentConfig {
    fn default() -> Self {
        SegmentConfig {
            target_mean_s: 10.0,
            max_duration_s: 15.0,
            id_prefix: "seg".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AudioSegment {
    pub id: String,
    #[serde(skip)]
    pub audio: Option<Waveform>,
    pub transcript: String,
    pub start_s: f64,
    pub end_s: f64,
    pub duration_s: f64,
    /// A single sentence longer than the maximum duration.
    pub oversized: bool,
}

#[derive(Debug, Error)]
pub enum SegmentError {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("boundary refers to silence #{index}, but only {count} silences were detected")]
    BadSilenceIndex { index: usize, count: usize },
    #[error("boundary offset {offset} is past the end of the transcript ({len} chars)")]
    BadOffset { offset: usize, len: usize },
    #[error("boundary offsets must increase with silence time (offset {offset} after {previous})")]
    Unordered { offset: usize, previous: usize },
    #[error("no sentence boundary falls on a silence, and the audio span {start_s:.2}–{end_s:.2} s exceeds the {max_s} s maximum")]
    Oversize { start_s: f64, end_s: f64, max_s: f64 },
    #[error("segment {id} ({start_s:.2}–{end_s:.2} s) has an empty transcript")]
    EmptyTranscript { id: String, start_s: f64, end_s: f64 },
    #[error("transcript is empty")]
    NoTranscript,
}

fn positive(name: &'static str, value: f64) -> Result<(), SegmentError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(SegmentError::NonPositive { name, value })
    }
}

/// Window start offsets (in samples) covering the whole waveform; the last
/// window is aligned to the end.
fn window_starts(len: usize, win: usize, hop: usize) -> Vec<usize> {
    if len <= win {
        return vec![0];
    }
    let mut starts: Vec<usize> = (0..=len - win).step_by(hop).collect();
    if starts.last().is_some_and(|&s| s + win < len) {
        starts.push(len - win);
    }
    starts
}

fn rms_dbfs(samples: &[i16]) -> f64 {
    if samples.is_empty() {
        return f64::NEG_INFINITY;
    }
    let energy: f64 = samples.iter().map(|&s| (s as f64) * (s as f64)).sum();
    10.0 * (energy / samples.len() as f64 / (FULL_SCALE * FULL_SCALE)).log10()
}

/// Find spans whose every analysis window has RMS below `threshold_db` and
/// that last at least `min_dur_s`.
pub fn detect_silences(
    w: &Waveform,
    threshold_db: f64,
    min_dur_s: f64,
) -> Result<Vec<SilenceSpan>, SegmentError> {
    detect_silences_with(w, threshold_db, min_dur_s, Exec::default())
}

pub fn detect_silences_with(
    w: &Waveform,
    threshold_db: f64,
    min_dur_s: f64,
    exec: Exec,
) -> Result<Vec<SilenceSpan>, SegmentError> {
    positive("min_dur_s", min_dur_s)?;
    if w.is_empty() {
        return Ok(Vec::new());
    }
    let rate = w.sample_rate as f64;
    let win = ((WINDOW_S * rate).round() as usize).max(1);
    let hop = ((HOP_S * rate).round() as usize).max(1);
    let starts = window_starts(w.len(), win, hop);
    let silent: Vec<bool> = exec.map(&starts, |&s| {
        let end = (s + win).min(w.len());
        rms_dbfs(&w.samples[s..end]) < threshold_db
    });

    let mut spans: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < starts.len() {
        if !silent[i] {
            i += 1;
            continue;
        }
        let first = i;
        while i + 1 < starts.len() && silent[i + 1] {
            i += 1;
        }
        let mut a = starts[first];
        let b = (starts[i] + win).min(w.len());
        if let Some(&(_, prev_end)) = spans.last() {
            a = a.max(prev_end);
        }
        if b > a {
            spans.push((a, b));
        }
        i += 1;
    }
    Ok(spans
        .into_iter()
        .map(|(a, b)| SilenceSpan {
            start_s: a as f64 / rate,
            end_s: b as f64 / rate,
        })
        .filter(|s| s.duration_s() + 1e-9 >= min_dur_s)
        .collect())
}

/// Character offsets where a new sentence starts: after `.`, `!`, `?`, `؟`,
/// `…` or `؛` followed by whitespace. Dots after one- or two-letter words
/// (abbreviations such as "د.") are not boundaries.
pub fn mark_sentence_boundaries(transcript: &str) -> Vec<usize> {
    let chars: Vec<char> = transcript.chars().collect();
    let mut marks = Vec::new();
    let mut word_len = 0usize;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if matches!(c, '.' | '!' | '?' | '؟' | '…' | '؛') {
            let mut j = i;
            while j + 1 < chars.len() && matches!(chars[j + 1], '.' | '!' | '?' | '؟' | '…' | '؛') {
                j += 1;
            }
            let abbreviation = c == '.' && j == i && word_len <= 2;
            let mut k = j + 1;
            while k < chars.len() && chars[k].is_whitespace() {
                k += 1;
            }
            if !abbreviation && k > j + 1 && k < chars.len() {
                marks.push(k);
            }
            word_len = 0;
            i = k;
            continue;
        }
        if c.is_whitespace() {
            word_len = 0;
        } else {
            word_len += 1;
        }
        i += 1;
    }
    marks
}

/// Pair each sentence mark with the nearest unused internal silence,
/// assuming speech progresses at a constant character rate. A heuristic for
/// when no explicit alignment is available; marks without a plausible
/// silence are dropped.
pub fn estimate_boundaries(
    silences: &[SilenceSpan],
    marks: &[usize],
    transcript_chars: usize,
    duration_s: f64,
) -> Vec<Boundary> {
    let internal: Vec<usize> = (0..silences.len())
        .filter(|&i| silences[i].start_s > 0.0 && silences[i].end_s < duration_s)
        .collect();
    let mut out: Vec<Boundary> = Vec::new();
    let mut next_candidate = 0;
    for &mark in marks {
        let expected = mark as f64 / transcript_chars.max(1) as f64 * duration_s;
        let best = internal[next_candidate.min(internal.len())..]
            .iter()
            .enumerate()
            .min_by(|(_, &a), (_, &b)| {
                let da = (silences[a].midpoint_s() - expected).abs();
                let db = (silences[b].midpoint_s() - expected).abs();
                da.total_cmp(&db)
            })
            .map(|(k, &idx)| (next_candidate + k, idx));
        if let Some((pos, idx)) = best {
            out.push(Boundary {
                silence_index: idx,
                char_offset: mark,
            });
            next_candidate = pos + 1;
        }
    }
    out
}

/// Cut a recording and its transcript into segments.
pub fn segment(
    w: &Waveform,
    transcript: &str,
    silences: &[SilenceSpan],
    boundaries: &[Boundary],
    config: &SegmentConfig,
) -> Result<Vec<AudioSegment>, SegmentError> {
    positive("target_mean_s", config.target_mean_s)?;
    positive("max_duration_s", config.max_duration_s)?;
    let chars: Vec<char> = transcript.chars().collect();
    if transcript.trim().is_empty() {
        return Err(SegmentError::NoTranscript);
    }
    let total = w.duration_s();

    // Eligible cuts: (time, char offset), ordered by time.
    let mut sorted = boundaries.to_vec();
    sorted.sort_by_key(|b| b.silence_index);
    let mut cuts: Vec<(f64, usize)> = Vec::with_capacity(sorted.len());
    for b in &sorted {
        let span = silences.get(b.silence_index).ok_or(SegmentError::BadSilenceIndex {
            index: b.silence_index,
            count: silences.len(),
        })?;
        if b.char_offset > chars.len() {
            return Err(SegmentError::BadOffset {
                offset: b.char_offset,
                len: chars.len(),
            });
        }
        if let Some(&(_, prev)) = cuts.last() {
            if b.char_offset < prev {
                return Err(SegmentError::Unordered {
                    offset: b.char_offset,
                    previous: prev,
                });
            }
        }
        let t = span.midpoint_s();
        if t > 0.0 && t < total {
            cuts.push((t, b.char_offset));
        }
    }

    if cuts.is_empty() && total > config.max_duration_s {
        return Err(SegmentError::Oversize {
            start_s: 0.0,
            end_s: total,
            max_s: config.max_duration_s,
        });
    }

    // Greedy: cut at a boundary when stopping here lands closer to the
    // target than extending to the next one, or when extending would exceed
    // the maximum.
    let mut chosen: Vec<(f64, usize)> = Vec::new();
    let mut start = 0.0;
    for (k, &(t, off)) in cuts.iter().enumerate() {
        let here = t - start;
        let next = cuts.get(k + 1).map_or(total, |&(nt, _)| nt) - start;
        let target = config.target_mean_s;
        if (here - target).abs() <= (next - target).abs() || next > config.max_duration_s {
            chosen.push((t, off));
            start = t;
        }
    }

    let mut segments = Vec::with_capacity(chosen.len() + 1);
    let mut prev = (0.0, 0usize);
    for (i, &(t, off)) in chosen.iter().chain(std::iter::once(&(total, chars.len()))).enumerate() {
        let id = format!("{}_{:04}", config.id_prefix, i + 1);
        let text: String = chars[prev.1..off].iter().collect();
        let text = text.trim().to_string();
        if text.is_empty() {
            return Err(SegmentError::EmptyTranscript {
                id,
                start_s: prev.0,
                end_s: t,
            });
        }
        let duration_s = t - prev.0;
        let oversized = duration_s > config.max_duration_s;
        if oversized {
            warn!(%id, duration_s, "single sentence exceeds the maximum segment duration");
        }
        segments.push(AudioSegment {
            id,
            audio: Some(w.slice_s(prev.0, t)),
            transcript: text,
            start_s: prev.0,
            end_s: t,
            duration_s,
            oversized,
        });
        prev = (t, off);
    }
    Ok(segments)
}

/// Shorten silences: edges to at most `max_pause_s / 2`, internal pauses to
/// at most `max_pause_s`. Samples outside the given spans are copied
/// unchanged.
pub fn reduce_silence(
    w: &Waveform,
    silences: &[SilenceSpan],
    max_pause_s: f64,
) -> Result<Waveform, SegmentError> {
    positive("max_pause_s", max_pause_s)?;
    let rate = w.sample_rate as f64;
    let edge_keep = (max_pause_s / 2.0 * rate).round() as usize;
    let inner_keep = (max_pause_s * rate).round() as usize;

    let mut removed: Vec<(usize, usize)> = Vec::new();
    for s in silences {
        let (a, b) = (w.index_at(s.start_s), w.index_at(s.end_s));
        if b <= a {
            continue;
        }
        let cut = if a == 0 {
            // leading (or the whole file): keep the tail next to speech
            (b - a > edge_keep).then(|| (a, b - edge_keep))
        } else if b == w.len() {
            (b - a > edge_keep).then(|| (a + edge_keep, b))
        } else {
            (b - a > inner_keep).then(|| {
                let head = inner_keep / 2;
                (a + head, b - (inner_keep - head))
            })
        };
        if let Some((x, y)) = cut {
            if removed.last().is_some_and(|&(_, e)| x < e) {
                continue;
            }
            removed.push((x, y));
        }
    }

    let mut out = Vec::with_capacity(w.len());
    let mut pos = 0;
    for (x, y) in removed {
        out.extend_from_slice(&w.samples[pos..x]);
        pos = y;
    }
    out.extend_from_slice(&w.samples[pos..]);
    Ok(Waveform {
        samples: out,
        sample_rate: w.sample_rate,
    })
}

/// Linearly scale so the peak sits at `target_db` dBFS (clamped to 0 dBFS).
/// Digital silence is returned unchanged.
pub fn normalize_loudness(w: &Waveform, target_db: f64) -> Waveform {
    let peak = w.peak();
    if peak == 0 {
        warn!("all-zero waveform; loudness normalization skipped");
        return w.clone();
    }
    let target = FULL_SCALE * 10f64.powf(target_db.min(0.0) / 20.0);
    let gain = target / peak as f64;
    Waveform {
        samples: w
            .samples
            .iter()
            .map(|&s| (s as f64 * gain).round().clamp(-FULL_SCALE, FULL_SCALE) as i16)
            .collect(),
        sample_rate: w.sample_rate,
    }
}

/// Generated recordings for exercising the segmenter: tone bursts per
/// sentence separated by digital silence, with matching transcripts.
pub mod synthetic {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::{detect_silences, Boundary, SilenceSpan};
    use crate::audio::Waveform;

    pub struct SyntheticCorpus {
        pub waveform: Waveform,
        pub transcript: String,
        pub sentence_durations: Vec<f64>,
        /// Offsets where sentences 2.. start.
        pub sentence_offsets: Vec<usize>,
        pub silences: Vec<SilenceSpan>,
        /// One boundary per inter-sentence silence.
        pub boundaries: Vec<Boundary>,
    }

    const WORDS: [&str; 8] = ["ذهب", "الولد", "إلى", "المدرسة", "وكتب", "الدرس", "في", "الصباح"];

    /// `n` sentences with durations uniform in `[min_s, max_s]`, separated
    /// by `gap_s` of silence. Extra pauses of `gap_s` are inserted inside
    /// every third sentence; they are silences but not sentence boundaries.
    pub fn corpus(n: usize, min_s: f64, max_s: f64, gap_s: f64, rate: u32, seed: u64) -> SyntheticCorpus {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut samples: Vec<i16> = Vec::new();
        let mut transcript = String::new();
        let mut durations = Vec::with_capacity(n);
        let mut offsets = Vec::new();
        let tone = |len: usize, freq: f64, out: &mut Vec<i16>| {
            let start = out.len();
            out.extend((0..len).map(|i| {
                let t = (start + i) as f64 / rate as f64;
                (0.5 * (2.0 * std::f64::consts::PI * freq * t).sin() * 32767.0) as i16
            }));
        };
        for k in 0..n {
            if k > 0 {
                samples.extend(std::iter::repeat_n(0, (gap_s * rate as f64) as usize));
                transcript.push(' ');
                offsets.push(transcript.chars().count());
            }
            let dur: f64 = rng.gen_range(min_s..=max_s);
            durations.push(dur);
            let len = (dur * rate as f64) as usize;
            let freq = 180.0 + 20.0 * (k % 5) as f64;
            if k % 3 == 2 && dur > 4.0 * gap_s {
                // a pause mid-sentence that must not become a cut
                let half = (len - (gap_s * rate as f64) as usize) / 2;
                tone(half, freq, &mut samples);
                samples.extend(std::iter::repeat_n(0, (gap_s * rate as f64) as usize));
                tone(len - half - (gap_s * rate as f64) as usize, freq, &mut samples);
            } else {
                tone(len, freq, &mut samples);
            }
            let n_words = ((dur * 2.0) as usize).max(2);
            let words: Vec<&str> = (0..n_words).map(|i| WORDS[(k + i) % WORDS.len()]).collect();
            transcript.push_str(&words.join(" "));
            transcript.push('.');
        }
        let waveform = Waveform::new(samples, rate).expect("supported rate");
        let silences = detect_silences(&waveform, -40.0, gap_s * 0.5).expect("positive min");

        // Pair sentence gaps (known positions) with detected silences.
        let mut boundaries = Vec::new();
        let mut t = 0.0;
        for (k, d) in durations.iter().enumerate().take(n.saturating_sub(1)) {
            t += d;
            let gap_mid = t + gap_s / 2.0;
            t += gap_s;
            if let Some(idx) = silences
                .iter()
                .position(|s| s.start_s <= gap_mid && gap_mid <= s.end_s)
            {
                boundaries.push(Boundary {
                    silence_index: idx,
                    char_offset: offsets[k],
                });
            }
        }
        SyntheticCorpus {
            waveform,
            transcript,
            sentence_durations: durations,
            sentence_offsets: offsets,
            silences,
            boundaries,
        }
    }
}
