use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::marks::{has_diacritics, strip_diacritics};
use crate::align::{align_indices, OpKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReviewReason {
    /// The speaker said a different word; the transcript follows the audio.
    Mispronunciation,
    /// Same letters, different vowels.
    DiacriticFix,
    /// Named entity or foreign word corrected by hand.
    Entity,
}

/// A transcript correction made so the text matches what was spoken.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewRecord {
    pub segment_id: String,
    pub original: String,
    pub corrected: String,
    pub reason: ReviewReason,
    pub reviewer: String,
}

#[derive(Debug, Error)]
pub enum ReviewError {
    #[error("reference transcript is empty")]
    EmptyReference,
    #[error("correction for `{0}` is identical to the original")]
    Unchanged(String),
    #[error("`{original}` → `{corrected}` changes letters but is marked {reason:?}")]
    SkeletonChanged {
        original: String,
        corrected: String,
        reason: ReviewReason,
    },
    #[error("{path}:{line}: {reason}")]
    Parse {
        path: String,
        line: usize,
        reason: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ReviewRecord {
    pub fn new(
        segment_id: impl Into<String>,
        original: impl Into<String>,
        corrected: impl Into<String>,
        reason: ReviewReason,
        reviewer: impl Into<String>,
    ) -> Result<Self, ReviewError> {
        let record = ReviewRecord {
            segment_id: segment_id.into(),
            original: original.into(),
            corrected: corrected.into(),
            reason,
            reviewer: reviewer.into(),
        };
        record.check()?;
        Ok(record)
    }

    pub fn check(&self) -> Result<(), ReviewError> {
        if self.original == self.corrected {
            return Err(ReviewError::Unchanged(self.original.clone()));
        }
        if self.reason != ReviewReason::Mispronunciation
            && strip_diacritics(&self.original) != strip_diacritics(&self.corrected)
        {
            return Err(ReviewError::SkeletonChanged {
                original: self.original.clone(),
                corrected: self.corrected.clone(),
                reason: self.reason,
            });
        }
        Ok(())
    }
}

/// Align the reference transcript with what was recognized in the audio and
/// propose a review record for every substituted word.
///
/// A hypothesis word with the same letters but different vowels yields a
/// diacritic fix; a different word yields a mispronunciation. Unvowelized
/// hypothesis words that only drop the reference's vowels carry no
/// information and are skipped.
pub fn match_transcript(
    segment_id: &str,
    reference: &str,
    hypothesis: &str,
) -> Result<Vec<ReviewRecord>, ReviewError> {
    let r: Vec<&str> = reference.split_whitespace().collect();
    let h: Vec<&str> = hypothesis.split_whitespace().collect();
    if r.is_empty() {
        return Err(ReviewError::EmptyReference);
    }
    let mut out = Vec::new();
    for (op, ri, hi) in align_indices(&r, &h) {
        if op != OpKind::Substitute {
            continue;
        }
        let (orig, corr) = (r[ri.unwrap()], h[hi.unwrap()]);
        let same_skeleton = strip_diacritics(orig) == strip_diacritics(corr);
        if same_skeleton && !has_diacritics(corr) {
            continue;
        }
        let reason = if same_skeleton {
            ReviewReason::DiacriticFix
        } else {
            ReviewReason::Mispronunciation
        };
        out.push(ReviewRecord::new(segment_id, orig, corr, reason, "auto-align")?);
    }
    Ok(out)
}

/// Replace every whole-word occurrence of each record's original with its
/// correction.
pub fn apply_reviews(text: &str, records: &[ReviewRecord]) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while !rest.is_empty() {
        let ws = rest.len() - rest.trim_start().len();
        out.push_str(&rest[..ws]);
        rest = &rest[ws..];
        let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
        let word = &rest[..end];
        match records.iter().rev().find(|r| r.original == word) {
            Some(r) => out.push_str(&r.corrected),
            None => out.push_str(word),
        }
        rest = &rest[end..];
    }
    out
}

pub fn write_jsonl(path: &Path, records: &[ReviewRecord]) -> Result<(), ReviewError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut f, r).map_err(std::io::Error::other)?;
        f.write_all(b"\n")?;
    }
    f.flush()?;
    Ok(())
}

pub fn read_jsonl(path: &Path) -> Result<Vec<ReviewRecord>, ReviewError> {
    let f = BufReader::new(std::fs::File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in f.lines().enumerate() {
        let line = line?;
        let line = line.trim_start_matches('\u{feff}');
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |reason: String| ReviewError::Parse {
            path: path.display().to_string(),
            line: i + 1,
            reason,
        };
        let record: ReviewRecord =
            serde_json::from_str(line).map_err(|e| parse_err(e.to_string()))?;
        record.check().map_err(|e| parse_err(e.to_string()))?;
        out.push(record);
    }
    Ok(out)
}
