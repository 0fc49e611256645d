//! Arabic text-to-speech pipeline.
//!
//! The crate covers the front-end and tooling around a two-stage neural
//! synthesizer: text normalization ([`normalizer`]), diacritic restoration
//! through a pluggable backend ([`diacritizer`]), corpus segmentation
//! ([`segmenter`]), the characters → mel → waveform synthesis contract with a
//! deterministic reference implementation ([`synth`]), and the evaluation
//! harness ([`eval`]): diacritic-stripped WER/CER, real-time factor and MOS
//! listening-study management.
//!
//! Data-parallel inner loops go through [`par`], which falls back to
//! sequential execution when the `parallel` feature is disabled.

pub mod align;
pub mod audio;
pub mod diacritizer;
pub mod eval;
pub mod manifest;
pub mod net;
pub mod normalizer;
pub mod par;
pub mod segmenter;
pub mod synth;

pub use audio::Waveform;
pub use diacritizer::{strip_diacritics, DiacritizedText};
pub use normalizer::{normalize, NormalizedText, NormalizerConfig};
pub use synth::{MelSpectrogram, ReferenceSynthesizer, SynthesisRequest, VoiceSpec};
