use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use natiq_core::diacritizer::validate_diacritization;
use natiq_core::manifest;
use natiq_core::normalizer::{AbbreviationLexicon, Case, Gender};
use natiq_core::par::Exec;
use natiq_core::segmenter::mark_sentence_boundaries;
use serde_json::json;

use crate::{load_config, pipeline, print_json, read_text, write_file, CmdResult, Classify, Failure};

#[derive(Clone, Copy, ValueEnum)]
pub enum GenderArg {
    M,
    F,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum CaseArg {
    Nom,
    Acc,
}

#[derive(Args)]
pub struct NormalizeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Gender of the counted noun when it is unknown
    #[arg(long, value_enum)]
    gender: Option<GenderArg>,
    #[arg(long, value_enum)]
    case: Option<CaseArg>,
    /// Abbreviation lexicon (pattern<TAB>expansion); replaces the built-in one
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Trace sidecar path [default: <out>.trace.json]
    #[arg(long)]
    trace: Option<PathBuf>,
}

fn sidecar(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".trace.json");
    out.with_file_name(name)
}

pub fn normalize(config: Option<&Path>, a: NormalizeArgs) -> CmdResult {
    let cfg = load_config(config, &[])?;
    let mut p = pipeline(&cfg)?;
    if let Some(g) = a.gender {
        p.normalizer.agreement.gender = match g {
            GenderArg::M => Gender::Masculine,
            GenderArg::F => Gender::Feminine,
        };
    }
    if let Some(c) = a.case {
        p.normalizer.agreement.case = match c {
            CaseArg::Nom => Case::Nominative,
            CaseArg::Acc => Case::AccusativeGenitive,
        };
    }
    if let Some(path) = &a.lexicon {
        p.normalizer.lexicon = AbbreviationLexicon::load(path)
            .input_err(path.display())?
            .into();
    }
    let text = read_text(&a.input)?;
    let lines: Vec<&str> = text.lines().collect();
    let results = Exec::default().map(&lines, |l| p.normalize(l));
    let mut out = String::new();
    let mut traces = Vec::new();
    for (i, n) in results.iter().enumerate() {
        out.push_str(&n.text);
        out.push('\n');
        if !n.trace.is_empty() {
            traces.push(json!({ "line": i + 1, "trace": n.trace }));
        }
    }
    write_file(&a.out, out)?;
    let trace_path = a.trace.unwrap_or_else(|| sidecar(&a.out));
    let trace = serde_json::to_vec_pretty(&traces).internal_err("trace")?;
    write_file(&trace_path, trace)
}

#[derive(Args)]
pub struct DiacritizeArgs {
    /// Normalized text, one line per utterance
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Treat input and output as `id|raw|diacritized` manifests; the raw
    /// field is normalized and diacritized into the third field
    #[arg(long)]
    manifest: bool,
    /// echo | table:<path> | http://host:port
    #[arg(long)]
    backend: Option<String>,
    /// fail | passthrough
    #[arg(long)]
    policy: Option<String>,
    /// Worker threads (0 = all cores)
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

pub fn diacritize(config: Option<&Path>, a: DiacritizeArgs) -> CmdResult {
    let cfg = load_config(
        config,
        &[("diacritizer", a.backend.clone()), ("failure_policy", a.policy.clone())],
    )?;
    let p = pipeline(&cfg)?;
    let text = read_text(&a.input)?;
    if a.manifest {
        let mut rows = manifest::parse(&text).input_err(a.input.display())?;
        let results = Exec::with_threads(a.jobs, || {
            Exec::Parallel.map(&rows, |r| {
                p.diacritize(&p.normalize(&r.raw_transcript).text)
                    .map_err(|e| (r.id.clone(), e))
            })
        });
        for (row, res) in rows.iter_mut().zip(results) {
            let d = res.map_err(|(id, e)| Failure::from(e).context(format!("row {id}")))?;
            row.diacritized_transcript = d.content;
        }
        let rendered = manifest::render(&rows).input_err("manifest")?;
        return write_file(&a.out, rendered);
    }
    let lines: Vec<&str> = text.lines().collect();
    let results = Exec::with_threads(a.jobs, || {
        Exec::Parallel.map(&lines, |l| {
            if l.trim().is_empty() {
                Ok(String::new())
            } else {
                p.diacritize(l).map(|d| d.content)
            }
        })
    });
    let mut out = String::new();
    for (i, res) in results.into_iter().enumerate() {
        let line = res.map_err(|e| Failure::from(e).context(format!("line {}", i + 1)))?;
        out.push_str(&line);
        out.push('\n');
    }
    write_file(&a.out, out)
}

#[derive(Args)]
pub struct ValidateArgs {
    #[arg(long = "in")]
    input: PathBuf,
}

pub fn validate(a: ValidateArgs) -> CmdResult {
    let text = read_text(&a.input)?;
    let bad: Vec<_> = text
        .lines()
        .enumerate()
        .filter_map(|(i, l)| {
            let v = validate_diacritization(l);
            (!v.is_empty()).then(|| json!({ "line": i + 1, "violations": v }))
        })
        .collect();
    print_json(&bad)?;
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Failure::input(format!("{} line(s) with misplaced diacritics", bad.len())))
    }
}

#[derive(Args)]
pub struct BoundariesArgs {
    #[arg(long)]
    transcript: PathBuf,
}

pub fn boundaries(a: BoundariesArgs) -> CmdResult {
    let text = read_text(&a.transcript)?;
    print_json(&mark_sentence_boundaries(&text))
}
