use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Subcommand};
use natiq_core::eval::{
    aggregate_mos, build_pool, measure_rtf, pair_by_id, rater_names, score_corpus, EvalReport,
    Metric, MosStudy, ReportCell, RtfMeasurement, ScoreOptions, DEFAULT_PER_RATER,
};
use natiq_core::par::Exec;
use natiq_core::synth::{RemoteSynthesizer, SynthesisRequest, Synthesizer};
use serde_json::json;

use crate::{load_config, pipeline, print_json, read_text, write_file, CmdResult, Classify, Failure, DEFAULT_SEED};

#[derive(Subcommand)]
pub enum EvalCmd {
    /// Word error rate after diacritic stripping
    Wer(ScoreArgs),
    /// Character error rate after diacritic stripping
    Cer(ScoreArgs),
    /// Real-time factor of the configured synthesizer
    Rtf(RtfArgs),
}

#[derive(Args)]
pub struct ScoreArgs {
    /// Reference transcripts: `id<TAB>text` or one sentence per line
    #[arg(long = "ref")]
    reference: PathBuf,
    /// Recognizer output: `id<TAB>text`
    #[arg(long)]
    hyp: PathBuf,
    /// Write an aligned diff report here
    #[arg(long)]
    diffs: Option<PathBuf>,
    /// Fold hamza/alef variants before scoring
    #[arg(long)]
    fold_alef: bool,
    #[arg(long)]
    keep_punctuation: bool,
    #[arg(long, default_value = "unknown")]
    model: String,
    #[arg(long, default_value = "unknown")]
    voice: String,
}

#[derive(Args)]
pub struct RtfArgs {
    #[arg(long)]
    text_file: PathBuf,
    #[arg(long)]
    voice: String,
    /// Extra delay injected into the reference synthesizer
    #[arg(long, default_value_t = 0)]
    delay_ms: u64,
    #[arg(long, default_value = "reference")]
    model: String,
}

pub fn eval(config: Option<&Path>, cmd: EvalCmd) -> CmdResult {
    match cmd {
        EvalCmd::Wer(a) => score(a, Metric::Wer),
        EvalCmd::Cer(a) => score(a, Metric::Cer),
        EvalCmd::Rtf(a) => rtf(config, a),
    }
}

fn score(a: ScoreArgs, metric: Metric) -> CmdResult {
    let pairs = pair_by_id(&read_text(&a.reference)?, &read_text(&a.hyp)?).input_err("pairing")?;
    let options = ScoreOptions {
        remove_punctuation: !a.keep_punctuation,
        fold_alef: a.fold_alef,
    };
    let corpus = score_corpus(&pairs, metric, options, Exec::default()).input_err("scoring")?;
    if let Some(path) = &a.diffs {
        write_file(path, corpus.render_diffs())?;
    }
    let (wer, cer) = match metric {
        Metric::Wer => (Some(corpus.percent), None),
        Metric::Cer => (None, Some(corpus.percent)),
    };
    let report = EvalReport {
        cells: vec![ReportCell {
            model: a.model,
            voice: a.voice,
            wer,
            cer,
            rtf: None,
            real_time: None,
            n_utterances: corpus.n_utterances,
        }],
    };
    print_json(&json!({ "report": report, "score": corpus }))
}

fn rtf(config: Option<&Path>, a: RtfArgs) -> CmdResult {
    let cfg = load_config(config, &[("synth_delay_ms", Some(a.delay_ms.to_string()))])?;
    let p = pipeline(&cfg)?;
    let voice = p.voice(&a.voice)?.clone();
    let text = read_text(&a.text_file)?;
    let mut rows = Vec::new();
    let (mut gen, mut dur) = (0.0, 0.0);
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let preview = p.preview(line).map_err(Failure::from)?;
        let req = SynthesisRequest::new(preview.diacritized, voice.clone(), p.output_rate)
            .input_err(format!("line {}", i + 1))?;
        let m = measure_rtf(p.synthesizer.as_ref(), &req).internal_err(format!("line {}", i + 1))?;
        gen += m.generation_s;
        dur += m.audio_duration_s;
        rows.push(json!({ "line": i + 1, "measurement": m }));
    }
    if rows.is_empty() {
        return Err(Failure::input("no sentences to measure"));
    }
    let total = RtfMeasurement::new(gen, dur).internal_err("rtf")?;
    let report = EvalReport {
        cells: vec![ReportCell {
            model: a.model,
            voice: a.voice,
            wer: None,
            cer: None,
            rtf: Some(total.rtf),
            real_time: Some(total.real_time),
            n_utterances: rows.len(),
        }],
    };
    print_json(&json!({ "report": report, "total": total, "utterances": rows }))
}

#[derive(Subcommand)]
pub enum MosCmd {
    /// Synthesize every sentence × model × voice into a new study
    Build(BuildArgs),
    /// Draw per-rater sample lists
    Assign(AssignArgs),
    /// Record scores (1–5)
    Rate(RateArgs),
    /// Mean score per model and voice
    Report(ReportArgs),
}

#[derive(Args)]
pub struct BuildArgs {
    /// One sentence per line
    #[arg(long)]
    sentences: PathBuf,
    /// `name` (configured synthesizer) or `name=http://host:port`; repeatable
    #[arg(long = "model", default_value = "reference")]
    models: Vec<String>,
    /// Repeatable; defaults to every configured voice
    #[arg(long = "voice")]
    voices: Vec<String>,
    #[arg(long)]
    audio_dir: PathBuf,
    #[arg(long)]
    study: PathBuf,
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args)]
pub struct AssignArgs {
    #[arg(long)]
    study: PathBuf,
    #[arg(long, default_value_t = 14)]
    raters: usize,
    #[arg(long, default_value_t = DEFAULT_PER_RATER)]
    per_rater: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args)]
pub struct RateArgs {
    #[arg(long)]
    study: PathBuf,
    #[arg(long, requires_all = ["sample", "score"], conflicts_with = "ratings")]
    rater: Option<String>,
    #[arg(long)]
    sample: Option<String>,
    #[arg(long)]
    score: Option<u8>,
    /// Bulk file of `rater<TAB>sample<TAB>score` lines
    #[arg(long)]
    ratings: Option<PathBuf>,
}

#[derive(Args)]
pub struct ReportArgs {
    #[arg(long)]
    study: PathBuf,
}

pub fn mos(config: Option<&Path>, cmd: MosCmd) -> CmdResult {
    match cmd {
        MosCmd::Build(a) => build(config, a),
        MosCmd::Assign(a) => {
            let mut study = load_study(&a.study)?;
            study
                .assign_raters(&rater_names(a.raters), a.per_rater, a.seed)
                .input_err("assign")?;
            study.save(&a.study).internal_err(a.study.display())?;
            print_json(&json!({ "raters": a.raters, "rows": study.assignment_rows(), "seed": a.seed }))
        }
        MosCmd::Rate(a) => {
            let mut study = load_study(&a.study)?;
            let mut entries = Vec::new();
            match (&a.ratings, &a.rater, &a.sample, a.score) {
                (Some(path), ..) => {
                    for (i, line) in read_text(path)?.lines().enumerate() {
                        if line.trim().is_empty() {
                            continue;
                        }
                        let f: Vec<&str> = line.split('\t').collect();
                        let [rater, sample, score] = f[..] else {
                            return Err(Failure::input(format!(
                                "{}:{}: expected rater<TAB>sample<TAB>score",
                                path.display(),
                                i + 1
                            )));
                        };
                        let score: u8 = score
                            .trim()
                            .parse()
                            .input_err(format!("{}:{}", path.display(), i + 1))?;
                        entries.push((rater.to_string(), sample.to_string(), score));
                    }
                }
                (None, Some(r), Some(s), Some(v)) => entries.push((r.clone(), s.clone(), v)),
                _ => return Err(Failure::input("pass --rater, --sample and --score, or --ratings")),
            }
            for (rater, sample, score) in &entries {
                study.rate(rater, sample, *score).input_err("rate")?;
            }
            study.save(&a.study).internal_err(a.study.display())?;
            print_json(&json!({ "recorded": entries.len(), "total": study.ratings.len() }))
        }
        MosCmd::Report(a) => print_json(&aggregate_mos(&load_study(&a.study)?)),
    }
}

fn load_study(path: &Path) -> CmdResult<MosStudy> {
    if !path.exists() {
        return Err(Failure::input(format!("{}: no such study", path.display())));
    }
    MosStudy::load(path).input_err(path.display())
}

fn build(config: Option<&Path>, a: BuildArgs) -> CmdResult {
    let cfg = load_config(config, &[])?;
    let p = pipeline(&cfg)?;
    let sentences: Vec<String> = read_text(&a.sentences)?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(str::to_string)
        .collect();
    if sentences.is_empty() {
        return Err(Failure::input("no sentences"));
    }
    let voices = if a.voices.is_empty() {
        p.voices.keys().cloned().collect()
    } else {
        a.voices.clone()
    };
    for v in &voices {
        p.voice(v)?;
    }
    let mut backends: BTreeMap<String, Arc<dyn Synthesizer>> = BTreeMap::new();
    let mut models = Vec::new();
    for m in &a.models {
        let (name, synth): (&str, Arc<dyn Synthesizer>) = match m.split_once('=') {
            Some((name, url)) => (
                name,
                Arc::new(RemoteSynthesizer::new(url, cfg.backend_timeout, cfg.max_in_flight)),
            ),
            None => (m.as_str(), p.synthesizer.clone()),
        };
        if !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') || name.is_empty() {
            return Err(Failure::input(format!("model name `{name}` must be [A-Za-z0-9-]+")));
        }
        if backends.insert(name.to_string(), synth).is_some() {
            return Err(Failure::input(format!("model `{name}` given twice")));
        }
        models.push(name.to_string());
    }
    std::fs::create_dir_all(&a.audio_dir).internal_err(a.audio_dir.display())?;
    let study = Exec::with_threads(a.jobs, || {
        build_pool(
            &sentences,
            &models,
            &voices,
            |item| {
                let preview = p.preview(&item.sentence).map_err(|e| e.to_string())?;
                let voice = p.voice(&item.voice).map_err(|e| e.to_string())?.clone();
                let req = SynthesisRequest::new(preview.diacritized, voice, p.output_rate)
                    .map_err(|e| e.to_string())?;
                let out = backends[&item.model].synthesize(&req).map_err(|e| e.to_string())?;
                let path = a.audio_dir.join(format!("{}.wav", item.id));
                out.waveform.write_wav(&path).map_err(|e| e.to_string())?;
                Ok(path.display().to_string())
            },
            Exec::Parallel,
        )
    });
    study.save(&a.study).internal_err(a.study.display())?;
    print_json(&json!({ "entries": study.pool.len(), "skipped": study.skipped }))
}
