//! Corpus manifest: one `id|raw_transcript|diacritized_transcript` row per
//! segment. Pipes and backslashes inside fields are backslash-escaped.

use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub id: String,
    pub raw_transcript: String,
    pub diacritized_transcript: String,
}

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("line {line}: expected 3 pipe-separated fields, found {found}")]
    FieldCount { line: usize, found: usize },
    #[error("line {line}: duplicate id `{id}`")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: dangling escape")]
    BadEscape { line: usize },
    #[error("line {line}: field contains a line break")]
    Newline { line: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn escape(field: &str) -> String {
    let mut out = String::with_capacity(field.len());
    for c in field.chars() {
        if c == '|' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out
}

fn split_escaped(line: &str, line_no: usize) -> Result<Vec<String>, ManifestError> {
    let mut fields = vec![String::new()];
    let mut chars = line.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => match chars.next() {
                Some(e) => fields.last_mut().unwrap().push(e),
                None => return Err(ManifestError::BadEscape { line: line_no }),
            },
            '|' => fields.push(String::new()),
            c => fields.last_mut().unwrap().push(c),
        }
    }
    Ok(fields)
}

impl ManifestRow {
    pub fn to_line(&self) -> String {
        format!(
            "{}|{}|{}",
            escape(&self.id),
            escape(&self.raw_transcript),
            escape(&self.diacritized_transcript)
        )
    }
}

pub fn render(rows: &[ManifestRow]) -> Result<String, ManifestError> {
    let mut seen = HashSet::new();
    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        let fields = [&row.id, &row.raw_transcript, &row.diacritized_transcript];
        if fields.iter().any(|f| f.contains(['\n', '\r'])) {
            return Err(ManifestError::Newline { line: i + 1 });
        }
        if !seen.insert(row.id.as_str()) {
            return Err(ManifestError::DuplicateId {
                line: i + 1,
                id: row.id.clone(),
            });
        }
        out.push_str(&row.to_line());
        out.push('\n');
    }
    Ok(out)
}

pub fn parse(text: &str) -> Result<Vec<ManifestRow>, ManifestError> {
    let mut seen = HashSet::new();
    let mut rows = Vec::new();
    for (i, line) in text.trim_start_matches('\u{feff}').lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields = split_escaped(line, line_no)?;
        let [id, raw, diac]: [String; 3] = fields.try_into().map_err(|f: Vec<String>| {
            ManifestError::FieldCount {
                line: line_no,
                found: f.len(),
            }
        })?;
        if !seen.insert(id.clone()) {
            return Err(ManifestError::DuplicateId { line: line_no, id });
        }
        rows.push(ManifestRow {
            id,
            raw_transcript: raw,
            diacritized_transcript: diac,
        });
    }
    Ok(rows)
}

pub fn write(path: &Path, rows: &[ManifestRow]) -> Result<(), ManifestError> {
    let text = render(rows)?;
    let mut f = std::fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

pub fn read(path: &Path) -> Result<Vec<ManifestRow>, ManifestError> {
    parse(&std::fs::read_to_string(path)?)
}
