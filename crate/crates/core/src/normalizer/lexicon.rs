use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

const DEFAULT_LEXICON: &str = include_str!("../../resources/abbreviations.tsv");

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("line {line}: expected `pattern<TAB>expansion`")]
    MissingTab { line: usize },
    #[error("line {line}: empty pattern or expansion")]
    Empty { line: usize },
    #[error("line {line}: duplicate pattern `{pattern}`")]
    Duplicate { line: usize, pattern: String },
    #[error("line {line}: expansion `{expansion}` contains digits")]
    DigitInExpansion { line: usize, expansion: String },
    #[error("reading lexicon: {0}")]
    Io(#[from] std::io::Error),
}

/// Dotted abbreviation → expansion words, loaded from a UTF-8 TSV resource.
#[derive(Debug, Clone, Default)]
pub struct AbbreviationLexicon {
    entries: BTreeMap<String, Vec<String>>,
    // first char → patterns (as chars), longest first
    by_first: HashMap<char, Vec<Vec<char>>>,
}

impl AbbreviationLexicon {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The lexicon shipped with the crate.
    pub fn builtin() -> Arc<Self> {
        static BUILTIN: OnceLock<Arc<AbbreviationLexicon>> = OnceLock::new();
        BUILTIN
            .get_or_init(|| {
                Arc::new(Self::parse(DEFAULT_LEXICON).expect("bundled lexicon is well-formed"))
            })
            .clone()
    }

    pub fn load(path: &Path) -> Result<Self, LexiconError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(text.trim_start_matches('\u{feff}'))
    }

    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut lexicon = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            if raw.trim().is_empty() || raw.starts_with('#') {
                continue;
            }
            let (pattern, expansion) = raw
                .split_once('\t')
                .ok_or(LexiconError::MissingTab { line })?;
            let pattern = pattern.trim();
            let words: Vec<String> = expansion.split_whitespace().map(str::to_string).collect();
            if pattern.is_empty() || words.is_empty() {
                return Err(LexiconError::Empty { line });
            }
            if expansion.chars().any(super::is_digit) {
                return Err(LexiconError::DigitInExpansion {
                    line,
                    expansion: expansion.to_string(),
                });
            }
            if lexicon.entries.contains_key(pattern) {
                return Err(LexiconError::Duplicate {
                    line,
                    pattern: pattern.to_string(),
                });
            }
            lexicon.insert(pattern, words);
        }
        Ok(lexicon)
    }

    fn insert(&mut self, pattern: &str, words: Vec<String>) {
        let chars: Vec<char> = pattern.chars().collect();
        let bucket = self.by_first.entry(chars[0]).or_default();
        bucket.push(chars);
        bucket.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        self.entries.insert(pattern.to_string(), words);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, pattern: &str) -> Option<&[String]> {
        self.entries.get(pattern).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Length in chars of the longest pattern matching `text` at `pos`.
    pub(crate) fn longest_match(&self, text: &[char], pos: usize) -> Option<usize> {
        let candidates = self.by_first.get(text.get(pos)?)?;
        candidates
            .iter()
            .find(|p| text[pos..].starts_with(p))
            .map(Vec::len)
    }
}
