use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::align::{align, AlignmentTrace};
use crate::diacritizer::strip_diacritics;
use crate::par::Exec;

/// Text preparation applied to both sides before scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreOptions {
    pub remove_punctuation: bool,
    /// Fold أ إ آ ٱ to ا, ى to ي and ة to ه.
    pub fold_alef: bool,
}

impl Default for ScoreOptions {
    fn default() -> Self {
        ScoreOptions {
            remove_punctuation: true,
            fold_alef: false,
        }
    }
}

impl ScoreOptions {
    pub fn normalize(&self, text: &str) -> String {
        let stripped = strip_diacritics(text);
        let mut out = String::with_capacity(stripped.len());
        for c in stripped.chars() {
            let c = if self.fold_alef { fold(c) } else { c };
            if self.remove_punctuation && is_punct(c) {
                out.push(' ');
            } else {
                out.push(c);
            }
        }
        out.split_whitespace().collect::<Vec<_>>().join(" ")
    }
}

fn fold(c: char) -> char {
    match c {
        'أ' | 'إ' | 'آ' | 'ٱ' => 'ا',
        'ى' => 'ي',
        'ة' => 'ه',
        c => c,
    }
}

fn is_punct(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(c, '،' | '؛' | '؟' | '«' | '»' | '…' | '–' | '—' | '٪' | '٫' | '٬')
}

/// Default scoring normalization: strip harakat, drop punctuation, collapse
/// whitespace.
pub fn default_normalize(text: &str) -> String {
    ScoreOptions::default().normalize(text)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRate {
    pub percent: f64,
    pub trace: AlignmentTrace,
}

fn rate(trace: AlignmentTrace) -> ErrorRate {
    ErrorRate {
        percent: 100.0 * trace.errors() as f64 / trace.reference_len as f64,
        trace,
    }
}

fn words(s: &str) -> Vec<&str> {
    s.split_whitespace().collect()
}

fn chars(s: &str) -> Vec<String> {
    s.chars().map(String::from).collect()
}

pub fn word_error_rate(
    reference: &str,
    hypothesis: &str,
    normalize: impl Fn(&str) -> String,
) -> Result<ErrorRate, EvalError> {
    let (r, h) = (normalize(reference), normalize(hypothesis));
    let rw = words(&r);
    if rw.is_empty() {
        return Err(EvalError::EmptyReference);
    }
    Ok(rate(align(&rw, &words(&h))))
}

/// Character error rate; spaces count as characters.
pub fn char_error_rate(
    reference: &str,
    hypothesis: &str,
    normalize: impl Fn(&str) -> String,
) -> Result<ErrorRate, EvalError> {
    let (r, h) = (normalize(reference), normalize(hypothesis));
    if r.is_empty() {
        return Err(EvalError::EmptyReference);
    }
    Ok(rate(align(&chars(&r), &chars(&h))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Wer,
    Cer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtteranceScore {
    pub id: String,
    pub percent: f64,
    pub errors: usize,
    pub reference_len: usize,
    #[serde(skip)]
    pub trace: Option<AlignmentTrace>,
}

/// Corpus-level score: total edits over total reference tokens.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusScore {
    pub metric: Metric,
    pub percent: f64,
    pub errors: usize,
    pub reference_len: usize,
    pub n_utterances: usize,
    pub utterances: Vec<UtteranceScore>,
}

/// One reference/hypothesis pair to score.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoredPair {
    pub id: String,
    pub reference: String,
    pub hypothesis: String,
}

pub fn score_corpus(
    pairs: &[ScoredPair],
    metric: Metric,
    options: ScoreOptions,
    exec: Exec,
) -> Result<CorpusScore, EvalError> {
    let scored = exec.map(pairs, |p| {
        let norm = |s: &str| options.normalize(s);
        let r = match metric {
            Metric::Wer => word_error_rate(&p.reference, &p.hypothesis, norm),
            Metric::Cer => char_error_rate(&p.reference, &p.hypothesis, norm),
        };
        r.map(|r| UtteranceScore {
            id: p.id.clone(),
            percent: r.percent,
            errors: r.trace.errors(),
            reference_len: r.trace.reference_len,
            trace: Some(r.trace),
        })
        .map_err(|_| EvalError::EmptyReferenceAt(p.id.clone()))
    });
    let utterances = scored.into_iter().collect::<Result<Vec<_>, _>>()?;
    if utterances.is_empty() {
        return Err(EvalError::EmptyReference);
    }
    let errors = utterances.iter().map(|u| u.errors).sum::<usize>();
    let reference_len = utterances.iter().map(|u| u.reference_len).sum::<usize>();
    Ok(CorpusScore {
        metric,
        percent: 100.0 * errors as f64 / reference_len as f64,
        errors,
        reference_len,
        n_utterances: utterances.len(),
        utterances,
    })
}

impl CorpusScore {
    /// Aligned diff of every utterance, one block per id.
    pub fn render_diffs(&self) -> String {
        let mut out = String::new();
        for u in &self.utterances {
            out.push_str(&format!(
                "## {} ({:.2}%, {} / {})\n",
                u.id, u.percent, u.errors, u.reference_len
            ));
            if let Some(t) = &u.trace {
                out.push_str(&t.render_diff());
                out.push('\n');
            }
        }
        out.push_str(&format!(
            "# {:?} {:.2}% over {} utterances\n",
            self.metric, self.percent, self.n_utterances
        ));
        out
    }
}

/// Pair references with hypotheses by id.
///
/// Reference lines are either `id<TAB>text` or bare text (id = 1-based line
/// number). Hypothesis lines are `id<TAB>text`. A reference with no
/// hypothesis is scored against the empty string.
pub fn pair_by_id(references: &str, hypotheses: &str) -> Result<Vec<ScoredPair>, EvalError> {
    let mut hyp = std::collections::HashMap::new();
    for (i, line) in hypotheses.trim_start_matches('\u{feff}').lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (id, text) = line.split_once('\t').ok_or_else(|| {
            EvalError::Parse(format!("hypothesis line {}: expected id<TAB>text", i + 1))
        })?;
        if hyp.insert(id.trim().to_string(), text.to_string()).is_some() {
            return Err(EvalError::Parse(format!(
                "hypothesis line {}: duplicate id `{}`",
                i + 1,
                id.trim()
            )));
        }
    }
    let mut pairs = Vec::new();
    for (i, line) in references.trim_start_matches('\u{feff}').lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (id, text) = match line.split_once('\t') {
            Some((id, text)) => (id.trim().to_string(), text.to_string()),
            None => ((i + 1).to_string(), line.to_string()),
        };
        let hypothesis = hyp.remove(&id).unwrap_or_default();
        pairs.push(ScoredPair {
            id,
            reference: text,
            hypothesis,
        });
    }
    if let Some(extra) = hyp.keys().min() {
        tracing::warn!(id = %extra, count = hyp.len(), "hypotheses without a reference ignored");
    }
    Ok(pairs)
}
