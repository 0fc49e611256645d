use serde::{Deserialize, Serialize};

use crate::normalizer::is_arabic_letter;

pub const FATHATAN: char = '\u{064B}';
pub const DAMMATAN: char = '\u{064C}';
pub const KASRATAN: char = '\u{064D}';
pub const FATHA: char = '\u{064E}';
pub const DAMMA: char = '\u{064F}';
pub const KASRA: char = '\u{0650}';
pub const SHADDA: char = '\u{0651}';
pub const SUKUN: char = '\u{0652}';
pub const TATWEEL: char = '\u{0640}';

/// Tanween, short vowels, shadda and sukun (U+064B–U+0652).
pub fn is_harakah(c: char) -> bool {
    ('\u{064B}'..='\u{0652}').contains(&c)
}

/// Remove harakat and tatweel; every other code point is kept in order.
pub fn strip_diacritics(text: &str) -> String {
    text.chars()
        .filter(|&c| !is_harakah(c) && c != TATWEEL)
        .collect()
}

pub fn has_diacritics(text: &str) -> bool {
    text.chars().any(is_harakah)
}

// Unicode canonical combining classes of U+064B..=U+0652.
fn combining_class(c: char) -> u8 {
    27 + (c as u32 - 0x064B) as u8
}

/// Reorder each run of harakat into Unicode canonical order (vowel or
/// tanween before shadda before sukun). Base characters are untouched.
pub fn canonical_order(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut run: Vec<char> = Vec::new();
    for c in text.chars() {
        if is_harakah(c) {
            run.push(c);
            continue;
        }
        if !run.is_empty() {
            run.sort_by_key(|&m| combining_class(m));
            out.extend(run.drain(..));
        }
        out.push(c);
    }
    run.sort_by_key(|&m| combining_class(m));
    out.extend(run);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// A mark as the very first code point.
    LeadingDiacritic,
    /// A mark whose preceding base is not an Arabic letter.
    DetachedDiacritic,
    /// The same mark twice on one letter.
    RepeatedMark,
    /// More than one vowel, tanween or sukun on one letter.
    ConflictingMarks,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// Character offset of the offending mark.
    pub offset: usize,
    pub rule: Rule,
}

/// Check mark placement. Marks attached to one letter are compared as a
/// set, so order within a cluster never triggers a violation.
pub fn validate_diacritization(text: &str) -> Vec<Violation> {
    let mut violations = Vec::new();
    // Marks seen on the current base: (mark, offset).
    let mut cluster: Vec<char> = Vec::new();
    let mut base_ok = false;
    for (offset, c) in text.chars().enumerate() {
        if !is_harakah(c) {
            cluster.clear();
            base_ok = is_arabic_letter(c);
            continue;
        }
        if offset == 0 {
            violations.push(Violation {
                offset,
                rule: Rule::LeadingDiacritic,
            });
        } else if !base_ok {
            violations.push(Violation {
                offset,
                rule: Rule::DetachedDiacritic,
            });
        } else if cluster.contains(&c) {
            violations.push(Violation {
                offset,
                rule: Rule::RepeatedMark,
            });
        } else if c != SHADDA && cluster.iter().any(|&m| m != SHADDA) {
            violations.push(Violation {
                offset,
                rule: Rule::ConflictingMarks,
            });
        }
        cluster.push(c);
    }
    violations
}
