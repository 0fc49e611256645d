use std::path::{Path, PathBuf};

use clap::Args;
use natiq_core::diacritizer::DiacritizationSource;
use natiq_core::manifest::{self, ManifestRow};
use natiq_core::par::Exec;
use natiq_core::segmenter::{
    detect_silences, estimate_boundaries, mark_sentence_boundaries, segment as cut, Boundary,
    SegmentConfig,
};
use natiq_core::{DiacritizedText, Waveform};
use serde::Serialize;

use crate::{load_config, pipeline, print_json, read_text, write_file, CmdResult, Classify, Failure};

#[derive(Args)]
pub struct SegmentArgs {
    /// Long recording (16-bit PCM WAV)
    #[arg(long)]
    audio: PathBuf,
    /// Transcript of the whole recording
    #[arg(long)]
    transcript: PathBuf,
    /// Output directory for segment WAVs, manifest.txt and segments.json
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 10.0)]
    target_mean: f64,
    #[arg(long, default_value_t = 15.0)]
    max_duration: f64,
    /// Windows quieter than this (dBFS) count as silence
    #[arg(long, default_value_t = -40.0, allow_hyphen_values = true)]
    threshold_db: f64,
    #[arg(long, default_value_t = 0.25)]
    min_silence: f64,
    /// JSON list of {silence_index, char_offset}; default pairs punctuation
    /// marks with silences by position
    #[arg(long)]
    boundaries: Option<PathBuf>,
    /// Drop the sentence mark at this character offset (repeatable)
    #[arg(long)]
    unmark: Vec<usize>,
    #[arg(long, default_value = "seg")]
    prefix: String,
}

#[derive(Serialize)]
struct SegmentSummary {
    id: String,
    path: PathBuf,
    start_s: f64,
    end_s: f64,
    duration_s: f64,
    oversized: bool,
}

pub fn segment(a: SegmentArgs) -> CmdResult {
    let wav = Waveform::read_wav(&a.audio).input_err(a.audio.display())?;
    let transcript = read_text(&a.transcript)?;
    let silences = detect_silences(&wav, a.threshold_db, a.min_silence).input_err("silence detection")?;
    let boundaries: Vec<Boundary> = match &a.boundaries {
        Some(path) => serde_json::from_str(&read_text(path)?).input_err(path.display())?,
        None => {
            let marks: Vec<usize> = mark_sentence_boundaries(&transcript)
                .into_iter()
                .filter(|m| !a.unmark.contains(m))
                .collect();
            estimate_boundaries(&silences, &marks, transcript.chars().count(), wav.duration_s())
        }
    };
    let cfg = SegmentConfig {
        target_mean_s: a.target_mean,
        max_duration_s: a.max_duration,
        id_prefix: a.prefix.clone(),
    };
    let segments = cut(&wav, &transcript, &silences, &boundaries, &cfg).input_err("segmentation")?;
    std::fs::create_dir_all(&a.out).internal_err(a.out.display())?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for s in &segments {
        let path = a.out.join(format!("{}.wav", s.id));
        if let Some(audio) = &s.audio {
            audio.write_wav(&path).internal_err(path.display())?;
        }
        rows.push(ManifestRow {
            id: s.id.clone(),
            raw_transcript: s.transcript.clone(),
            diacritized_transcript: String::new(),
        });
        summary.push(SegmentSummary {
            id: s.id.clone(),
            path,
            start_s: s.start_s,
            end_s: s.end_s,
            duration_s: s.duration_s,
            oversized: s.oversized,
        });
    }
    manifest::write(&a.out.join("manifest.txt"), &rows).internal_err("manifest")?;
    let json = serde_json::to_vec_pretty(&summary).internal_err("summary")?;
    write_file(&a.out.join("segments.json"), json)?;
    print_json(&summary)
}

#[derive(Args)]
pub struct SynthArgs {
    /// One utterance per line; blank lines are skipped
    #[arg(long, conflicts_with = "manifest", required_unless_present = "manifest")]
    text_file: Option<PathBuf>,
    /// `id|raw|diacritized` manifest; rows with an empty third field are
    /// normalized and diacritized from the raw field
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long)]
    voice: String,
    #[arg(long)]
    out: PathBuf,
    /// Input lines are already diacritized; skip normalization
    #[arg(long)]
    diacritized: bool,
    #[arg(long)]
    rate: Option<u32>,
    /// Worker threads (0 = all cores)
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Serialize)]
struct SynthSummary {
    id: String,
    path: PathBuf,
    duration_s: f64,
    synth_s: f64,
    rtf: f64,
}

struct Utterance {
    id: String,
    text: String,
    diacritized: bool,
}

pub fn synth(config: Option<&Path>, a: SynthArgs) -> CmdResult {
    let cfg = load_config(config, &[("output_rate", a.rate.map(|r| r.to_string()))])?;
    let p = pipeline(&cfg)?;
    p.voice(&a.voice)?;
    let utterances: Vec<Utterance> = match (&a.text_file, &a.manifest) {
        (Some(path), _) => read_text(path)?
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| Utterance {
                id: format!("{:04}", i + 1),
                text: l.to_string(),
                diacritized: a.diacritized,
            })
            .collect(),
        (None, Some(path)) => manifest::parse(&read_text(path)?)
            .input_err(path.display())?
            .into_iter()
            .map(|r| {
                let done = !r.diacritized_transcript.trim().is_empty();
                Utterance {
                    id: r.id,
                    text: if done { r.diacritized_transcript } else { r.raw_transcript },
                    diacritized: done,
                }
            })
            .collect(),
        (None, None) => return Err(Failure::input("pass --text-file or --manifest")),
    };
    if utterances.is_empty() {
        return Err(Failure::input("no utterances to synthesize"));
    }
    for u in &utterances {
        if u.id.contains(['/', '\\']) || u.id.starts_with('.') {
            return Err(Failure::input(format!("id `{}` is not a usable file name", u.id)));
        }
    }
    std::fs::create_dir_all(&a.out).internal_err(a.out.display())?;
    let results = Exec::with_threads(a.jobs, || {
        Exec::Parallel.map(&utterances, |u| {
            let text = if u.diacritized {
                DiacritizedText::validated(&u.text, DiacritizationSource::Backend)
                    .map_err(|e| Failure::input(format!("{}: {e}", u.id)))?
            } else {
                p.preview(&u.text)
                    .map_err(|e| Failure::from(e).context(u.id.clone()))?
                    .diacritized
            };
            let out = p.synthesize(&text, &a.voice).map_err(|e| Failure::from(e).context(u.id.clone()))?;
            let path = a.out.join(format!("{}.wav", u.id));
            out.waveform.write_wav(&path).internal_err(path.display())?;
            let duration_s = out.waveform.duration_s();
            Ok(SynthSummary {
                id: u.id.clone(),
                path,
                duration_s,
                synth_s: out.timing_s,
                rtf: out.timing_s / duration_s,
            })
        })
    });
    let summary = results.into_iter().collect::<CmdResult<Vec<_>>>()?;
    print_json(&summary)
}

#[derive(Args)]
pub struct ServeArgs {
    #[arg(long)]
    bind: Option<String>,
    #[arg(long)]
    static_dir: Option<PathBuf>,
    #[arg(long)]
    storage_dir: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
}

pub fn serve(config: Option<&Path>, a: ServeArgs) -> CmdResult {
    let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
    let cfg = load_config(
        config,
        &[
            ("bind", a.bind.clone()),
            ("static_dir", path(&a.static_dir)),
            ("storage_dir", path(&a.storage_dir)),
            ("workers", a.workers.map(|w| w.to_string())),
        ],
    )?;
    let rt = tokio::runtime::Runtime::new().internal_err("runtime")?;
    rt.block_on(natiq_service::serve(cfg)).map_err(|e| match e {
        natiq_service::StartError::Bind { .. } => Failure::input(e),
        e => Failure::internal(e),
    })
}
