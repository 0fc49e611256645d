use serde::{Deserialize, Serialize};

use super::lexicon::AbbreviationLexicon;
use super::{digit_value, is_digit};

/// Half-open range of character (not byte) offsets into the raw input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TokenKind {
    ArabicWord,
    Integer,
    Decimal,
    Fraction,
    Date,
    Abbreviation,
    Latin,
    Punctuation,
    Whitespace,
}

impl TokenKind {
    pub fn is_numeric(self) -> bool {
        matches!(
            self,
            TokenKind::Integer | TokenKind::Decimal | TokenKind::Fraction | TokenKind::Date
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub kind: TokenKind,
    pub span: Span,
}

impl Token {
    /// Surface with every digit mapped to ASCII; other characters kept.
    pub fn ascii_digits(&self) -> String {
        self.surface
            .chars()
            .map(|c| match digit_value(c) {
                Some(d) => char::from(b'0' + d as u8),
                None => c,
            })
            .collect()
    }

    /// Numeric value of an integer token (`None` for other kinds or when
    /// the digit run overflows `u64`).
    pub fn integer_value(&self) -> Option<u64> {
        if self.kind != TokenKind::Integer {
            return None;
        }
        self.surface.chars().try_fold(0u64, |acc, c| {
            acc.checked_mul(10)?.checked_add(digit_value(c)? as u64)
        })
    }
}

/// Characters that belong to Arabic words: letters, harakat, tatweel and the
/// presentation-form blocks. Arabic digits and punctuation are excluded.
pub fn is_arabic_letter(c: char) -> bool {
    matches!(c as u32,
        0x0621..=0x065F
        | 0x0670..=0x06D3
        | 0x06D5
        | 0x06E5..=0x06E6
        | 0x06EE..=0x06EF
        | 0x06FA..=0x06FC
        | 0x06FF
        | 0x0750..=0x077F
        | 0x08A0..=0x08FF
        | 0xFB50..=0xFDFF
        | 0xFE70..=0xFEFC)
}

fn is_latin(c: char) -> bool {
    c.is_alphabetic() && !is_arabic_letter(c)
}

fn is_word_char(c: char) -> bool {
    is_arabic_letter(c) || is_latin(c)
}

fn is_decimal_separator(c: char) -> bool {
    c == '.' || c == '\u{066B}'
}

/// Split raw text into tokens whose surfaces concatenate back to the input.
pub fn tokenize(raw: &str, lexicon: &AbbreviationLexicon) -> Vec<Token> {
    let chars: Vec<char> = raw.chars().collect();
    let mut tokens = Vec::new();
    let mut pos = 0;
    while pos < chars.len() {
        let (kind, len) = classify_at(&chars, pos, lexicon);
        debug_assert!(len > 0);
        let end = pos + len;
        tokens.push(Token {
            surface: chars[pos..end].iter().collect(),
            kind,
            span: Span { start: pos, end },
        });
        pos = end;
    }
    tokens
}

fn run_len(chars: &[char], pos: usize, pred: impl Fn(char) -> bool) -> usize {
    chars[pos..].iter().take_while(|&&c| pred(c)).count()
}

fn classify_at(chars: &[char], pos: usize, lexicon: &AbbreviationLexicon) -> (TokenKind, usize) {
    let c = chars[pos];
    if c.is_whitespace() {
        return (TokenKind::Whitespace, run_len(chars, pos, char::is_whitespace));
    }
    if is_digit(c) {
        return numeric_at(chars, pos);
    }
    let at_boundary = pos == 0 || !is_word_char(chars[pos - 1]);
    if at_boundary {
        if let Some(len) = lexicon.longest_match(chars, pos) {
            let ends_in_letter = is_word_char(chars[pos + len - 1]);
            let next_is_letter = chars.get(pos + len).is_some_and(|&n| is_word_char(n));
            if !(ends_in_letter && next_is_letter) {
                return (TokenKind::Abbreviation, len);
            }
        }
    }
    if is_arabic_letter(c) {
        return (TokenKind::ArabicWord, run_len(chars, pos, is_arabic_letter));
    }
    if is_latin(c) {
        return (TokenKind::Latin, run_len(chars, pos, is_latin));
    }
    (TokenKind::Punctuation, 1)
}

fn numeric_at(chars: &[char], pos: usize) -> (TokenKind, usize) {
    let lead = run_len(chars, pos, is_digit);
    let after = pos + lead;
    let sep = chars.get(after).copied();

    if let Some(len) = date_len(chars, pos, lead) {
        return (TokenKind::Date, len);
    }
    if let Some(s) = sep {
        let digits_after = if after + 1 < chars.len() {
            run_len(chars, after + 1, is_digit)
        } else {
            0
        };
        if digits_after > 0 {
            if is_decimal_separator(s) {
                return (TokenKind::Decimal, lead + 1 + digits_after);
            }
            if s == '/' {
                return (TokenKind::Fraction, lead + 1 + digits_after);
            }
        }
    }
    (TokenKind::Integer, lead)
}

/// d{1,2} sep d{1,2} sep d{4} with a consistent `/` or `-` separator.
fn date_len(chars: &[char], pos: usize, lead: usize) -> Option<usize> {
    if !(1..=2).contains(&lead) {
        return None;
    }
    let sep = *chars.get(pos + lead)?;
    if sep != '/' && sep != '-' {
        return None;
    }
    let month_start = pos + lead + 1;
    if month_start >= chars.len() {
        return None;
    }
    let month = run_len(chars, month_start, is_digit);
    if !(1..=2).contains(&month) || chars.get(month_start + month) != Some(&sep) {
        return None;
    }
    let year_start = month_start + month + 1;
    if year_start >= chars.len() {
        return None;
    }
    let year = run_len(chars, year_start, is_digit);
    (year == 4).then_some(year_start + year - pos)
}
