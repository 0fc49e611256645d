//! Text normalization: expand numbers, decimals, fractions, dates and
//! dotted abbreviations into spelled-out Arabic words.
//!
//! [`normalize`] tokenizes the input, expands each token, and renders the
//! result back into a string while keeping the original whitespace and
//! punctuation. Every expansion is recorded in the trace with its input span.
//! Numeric strings that cannot be spelled as a single number (too large, too
//! many decimal places, impossible dates) are read digit by digit and
//! flagged, so the output never contains a digit.

mod lexicon;
mod numbers;
mod tokenizer;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use tracing::warn;

pub use lexicon::{AbbreviationLexicon, LexiconError};
pub use numbers::{
    denominator_words, spell_decimal, spell_digits, spell_fraction, spell_integer, Agreement,
    Case, DecimalValue, Gender, NumberError, NumberSpelling, MAX_INTEGER, MAX_SUPPORTED_PLACES,
};
pub use tokenizer::{is_arabic_letter, tokenize, Span, Token, TokenKind};

/// Value of an ASCII, Arabic-Indic or Extended Arabic-Indic digit.
pub fn digit_value(c: char) -> Option<u32> {
    match c {
        '0'..='9' => Some(c as u32 - '0' as u32),
        '\u{0660}'..='\u{0669}' => Some(c as u32 - 0x0660),
        '\u{06F0}'..='\u{06F9}' => Some(c as u32 - 0x06F0),
        _ => None,
    }
}

pub fn is_digit(c: char) -> bool {
    digit_value(c).is_some()
}

/// Raw input with an opaque source identifier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawText {
    pub content: String,
    pub source_id: String,
}

impl RawText {
    pub fn new(content: impl Into<String>, source_id: impl Into<String>) -> Self {
        RawText {
            content: content.into(),
            source_id: source_id.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MonthNames {
    /// كانون الثاني، شباط، آذار …
    #[default]
    Levant,
    /// يناير، فبراير، مارس …
    Gregorian,
}

const LEVANT_MONTHS: [&str; 12] = [
    "كانون الثاني",
    "شباط",
    "آذار",
    "نيسان",
    "أيار",
    "حزيران",
    "تموز",
    "آب",
    "أيلول",
    "تشرين الأول",
    "تشرين الثاني",
    "كانون الأول",
];
const GREGORIAN_MONTHS: [&str; 12] = [
    "يناير", "فبراير", "مارس", "أبريل", "مايو", "يونيو", "يوليو", "أغسطس", "سبتمبر", "أكتوبر",
    "نوفمبر", "ديسمبر",
];

impl MonthNames {
    pub fn name(self, month: u32) -> Option<&'static str> {
        let idx = month.checked_sub(1)? as usize;
        match self {
            MonthNames::Levant => LEVANT_MONTHS.get(idx).copied(),
            MonthNames::Gregorian => GREGORIAN_MONTHS.get(idx).copied(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct NormalizerConfig {
    /// Agreement used when the counted noun is unknown.
    pub agreement: Agreement,
    pub months: MonthNames,
    pub max_decimal_places: u8,
    pub lexicon: Arc<AbbreviationLexicon>,
}

impl Default for NormalizerConfig {
    fn default() -> Self {
        NormalizerConfig {
            agreement: Agreement::default(),
            months: MonthNames::default(),
            max_decimal_places: 4,
            lexicon: AbbreviationLexicon::builtin(),
        }
    }
}

/// Why a token was not expanded the regular way.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "detail")]
pub enum TraceFlag {
    /// Integer beyond the spelled range, read digit by digit.
    OutOfRange,
    /// Decimal with more places than configured; fraction read digit by digit.
    PrecisionOverflow,
    /// Date-shaped token with an impossible day or month; components read as numbers.
    InvalidDate,
    /// Abbreviation missing from the lexicon; surface kept.
    Unexpandable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub input: Span,
    pub kind: TokenKind,
    pub surface: String,
    /// Character range in [`NormalizedText::text`].
    pub output: Span,
    /// Word indices (into [`NormalizedText::words`]) overlapping `output`.
    pub words: Span,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agreement: Option<Agreement>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flag: Option<TraceFlag>,
}

impl TraceEntry {
    pub fn is_expansion(&self) -> bool {
        self.kind.is_numeric() || self.kind == TokenKind::Abbreviation
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedText {
    pub text: String,
    pub words: Vec<String>,
    pub trace: Vec<TraceEntry>,
}

impl NormalizedText {
    /// Wrap text that needs no normalization (e.g. already-normalized input).
    pub fn from_normalized(text: impl Into<String>) -> Self {
        let text = text.into();
        let words = text.split_whitespace().map(str::to_string).collect();
        NormalizedText {
            text,
            words,
            trace: Vec::new(),
        }
    }
}

/// Signals that an abbreviation token has no lexicon entry.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no expansion for abbreviation `{0}`")]
pub struct Unexpandable(pub String);

pub fn expand_abbreviation(
    token: &Token,
    lexicon: &AbbreviationLexicon,
) -> Result<Vec<String>, Unexpandable> {
    lexicon
        .get(&token.surface)
        .map(<[String]>::to_vec)
        .ok_or_else(|| Unexpandable(token.surface.clone()))
}

// Single-letter proclitics that attach to the following word.
const PROCLITICS: [&str; 5] = ["و", "ف", "ب", "ل", "ك"];

struct Expansion {
    words: Vec<String>,
    agreement: Option<Agreement>,
    flag: Option<TraceFlag>,
}

impl Expansion {
    fn plain(words: Vec<String>) -> Self {
        Expansion {
            words,
            agreement: None,
            flag: None,
        }
    }
}

fn expand(token: &Token, config: &NormalizerConfig) -> Expansion {
    let a = config.agreement;
    let ascii = token.ascii_digits();
    match token.kind {
        TokenKind::Integer => match numbers::parse_bounded(&ascii) {
            Ok(n) => Expansion {
                words: numbers::spell_integer_with(n, a, false).expect("bounded"),
                agreement: Some(a),
                flag: None,
            },
            Err(_) => Expansion {
                words: spell_digits(&ascii),
                agreement: None,
                flag: Some(TraceFlag::OutOfRange),
            },
        },
        TokenKind::Decimal => {
            let (int, frac) = ascii
                .split_once(['.', '\u{066B}'])
                .expect("decimal tokens contain a separator");
            match DecimalValue::from_parts(int, frac)
                .and_then(|v| spell_decimal(&NumberSpelling::new(v, a), config.max_decimal_places))
            {
                Ok(words) => Expansion {
                    words,
                    agreement: Some(a),
                    flag: None,
                },
                Err(err) => {
                    let mut words = match numbers::parse_bounded(int) {
                        Ok(n) => numbers::spell_integer_with(n, a, false).expect("bounded"),
                        Err(_) => spell_digits(int),
                    };
                    words.push("فاصلة".into());
                    words.extend(spell_digits(frac));
                    let flag = match err {
                        NumberError::PrecisionOverflow { .. } => TraceFlag::PrecisionOverflow,
                        _ => TraceFlag::OutOfRange,
                    };
                    Expansion {
                        words,
                        agreement: Some(a),
                        flag: Some(flag),
                    }
                }
            }
        }
        TokenKind::Fraction => {
            let (num, den) = ascii.split_once('/').expect("fraction tokens contain a slash");
            match (numbers::parse_bounded(num), numbers::parse_bounded(den)) {
                (Ok(n), Ok(d)) => Expansion {
                    words: spell_fraction(n, d, a.case).expect("bounded"),
                    agreement: Some(a),
                    flag: None,
                },
                _ => {
                    let mut words = spell_digits(num);
                    words.push("على".into());
                    words.extend(spell_digits(den));
                    Expansion {
                        words,
                        agreement: None,
                        flag: Some(TraceFlag::OutOfRange),
                    }
                }
            }
        }
        TokenKind::Date => expand_date(&ascii, config),
        TokenKind::Abbreviation => match expand_abbreviation(token, &config.lexicon) {
            Ok(words) => Expansion::plain(words),
            Err(e) => {
                warn!("{e}; keeping surface");
                Expansion {
                    words: vec![token.surface.clone()],
                    agreement: None,
                    flag: Some(TraceFlag::Unexpandable),
                }
            }
        },
        _ => Expansion::plain(vec![token.surface.clone()]),
    }
}

fn days_in_month(year: u32, month: u32) -> u32 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if (year % 4 == 0 && year % 100 != 0) || year % 400 == 0 => 29,
        2 => 28,
        _ => 0,
    }
}

fn expand_date(ascii: &str, config: &NormalizerConfig) -> Expansion {
    let parts: Vec<u32> = ascii
        .split(['/', '-'])
        .map(|p| p.parse().expect("date components are short digit runs"))
        .collect();
    let (day, month, year) = (parts[0], parts[1], parts[2]);
    let a = config.agreement;
    let masc = Agreement {
        gender: Gender::Masculine,
        case: a.case,
    };
    let spell = |n: u32, agr| numbers::spell_integer_with(n as u64, agr, false).expect("small");
    let valid = (1..=12).contains(&month) && day >= 1 && day <= days_in_month(year, month);
    if valid {
        let mut words = spell(day, a);
        let name = config.months.name(month).expect("month checked");
        words.extend(name.split(' ').map(str::to_string));
        words.extend(spell(year, masc));
        Expansion {
            words,
            agreement: Some(a),
            flag: None,
        }
    } else {
        let mut words = spell(day, a);
        words.extend(spell(month, a));
        words.extend(spell(year, masc));
        Expansion {
            words,
            agreement: Some(a),
            flag: Some(TraceFlag::InvalidDate),
        }
    }
}

/// Expand every number, date and abbreviation in `raw`.
pub fn normalize(raw: &RawText, config: &NormalizerConfig) -> NormalizedText {
    normalize_str(&raw.content, config)
}

pub fn normalize_str(raw: &str, config: &NormalizerConfig) -> NormalizedText {
    let raw = raw.trim_start_matches('\u{feff}');
    let tokens = tokenize(raw, &config.lexicon);
    let mut text = String::with_capacity(raw.len() * 2);
    let mut text_chars = 0usize;
    let mut trace = Vec::with_capacity(tokens.len());

    // (token kind, was expanded, surface) of the previous non-whitespace token
    // directly adjacent to the current one.
    let mut prev: Option<(TokenKind, bool, &str)> = None;

    for token in &tokens {
        if token.kind == TokenKind::Whitespace {
            text.push_str(&token.surface);
            text_chars += token.span.len();
            prev = None;
            continue;
        }
        let expansion = expand(token, config);
        let expanded = token.kind.is_numeric() || token.kind == TokenKind::Abbreviation;
        let wordlike = expanded || matches!(token.kind, TokenKind::ArabicWord | TokenKind::Latin);

        if let Some((prev_kind, prev_expanded, prev_surface)) = prev {
            let prev_wordlike =
                prev_expanded || matches!(prev_kind, TokenKind::ArabicWord | TokenKind::Latin);
            let glued_proclitic = prev_kind == TokenKind::ArabicWord
                && PROCLITICS.contains(&prev_surface)
                && expanded;
            if (expanded || prev_expanded) && wordlike && prev_wordlike && !glued_proclitic {
                text.push(' ');
                text_chars += 1;
            }
        }

        let rendered = expansion.words.join(" ");
        let start = text_chars;
        text_chars += rendered.chars().count();
        text.push_str(&rendered);
        trace.push(TraceEntry {
            input: token.span,
            kind: token.kind,
            surface: token.surface.clone(),
            output: Span {
                start,
                end: text_chars,
            },
            words: Span { start: 0, end: 0 },
            agreement: expansion.agreement,
            flag: expansion.flag,
        });
        prev = Some((token.kind, expanded, token.surface.as_str()));
    }

    let words: Vec<String> = text.split_whitespace().map(str::to_string).collect();
    assign_word_ranges(&text, &mut trace);
    NormalizedText { text, words, trace }
}

fn assign_word_ranges(text: &str, trace: &mut [TraceEntry]) {
    // char span of every whitespace-delimited word
    let mut spans = Vec::new();
    let mut start = None;
    for (i, c) in text.chars().enumerate() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                spans.push((s, i));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        spans.push((s, text.chars().count()));
    }
    for entry in trace {
        let first = spans.partition_point(|&(_, e)| e <= entry.output.start);
        let last = spans.partition_point(|&(s, _)| s < entry.output.end);
        entry.words = Span {
            start: first,
            end: last.max(first),
        };
    }
}
