//! Spelling of cardinals, decimals and fractions as inflected Arabic words.
//!
//! Agreement follows classical rules: units 3–10 take the gender opposite to
//! the counted noun, 11–19 are two-word compounds, tens are joined
//! units-first with "و", and the scale nouns (ألف, مليون, مليار) take their
//! singular, dual, plural or accusative-singular form depending on the count.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest integer [`spell_integer`] accepts.
pub const MAX_INTEGER: u64 = 1_000_000_000_000;

/// Largest fractional precision for which a denominator word exists.
pub const MAX_SUPPORTED_PLACES: u8 = 6;

/// Grammatical gender of the counted noun.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Masculine,
    Feminine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Case {
    Nominative,
    AccusativeGenitive,
}

/// Gender and case a numeral must agree with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Agreement {
    pub gender: Gender,
    pub case: Case,
}

impl Default for Agreement {
    fn default() -> Self {
        Agreement {
            gender: Gender::Masculine,
            case: Case::AccusativeGenitive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumberError {
    #[error("{value} is out of range: integers are spelled up to {limit}", limit = MAX_INTEGER)]
    OutOfRange { value: String },
    #[error("fraction has {digits} digits, more than the configured maximum of {max}")]
    PrecisionOverflow { digits: usize, max: u8 },
    #[error("`{0}` is not a decimal number")]
    Malformed(String),
}

/// A non-negative decimal kept exactly as integer and fractional digits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecimalValue {
    pub integer: u64,
    /// Fractional digits as written, leading zeros included ("07" in 0.07).
    pub fraction: String,
}

impl DecimalValue {
    /// Parse from ASCII integer and fraction digit strings.
    pub fn from_parts(integer: &str, fraction: &str) -> Result<Self, NumberError> {
        if integer.is_empty()
            || !integer.bytes().all(|b| b.is_ascii_digit())
            || !fraction.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(NumberError::Malformed(format!("{integer}.{fraction}")));
        }
        let value = parse_bounded(integer)?;
        Ok(DecimalValue {
            integer: value,
            fraction: fraction.to_string(),
        })
    }

    pub fn is_integral(&self) -> bool {
        self.fraction.bytes().all(|b| b == b'0')
    }
}

impl std::str::FromStr for DecimalValue {
    type Err = NumberError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once('.') {
            Some((i, f)) if !f.is_empty() => DecimalValue::from_parts(i, f),
            Some(_) => Err(NumberError::Malformed(s.to_string())),
            None => DecimalValue::from_parts(s, ""),
        }
    }
}

/// Everything needed to spell one number.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumberSpelling {
    pub value: DecimalValue,
    pub gender: Gender,
    pub case: Case,
    pub definite: bool,
}

impl NumberSpelling {
    pub fn new(value: DecimalValue, agreement: Agreement) -> Self {
        NumberSpelling {
            value,
            gender: agreement.gender,
            case: agreement.case,
            definite: false,
        }
    }

    fn agreement(&self) -> Agreement {
        Agreement {
            gender: self.gender,
            case: self.case,
        }
    }
}

/// Parse an ASCII digit string, rejecting anything above [`MAX_INTEGER`].
pub(crate) fn parse_bounded(digits: &str) -> Result<u64, NumberError> {
    let trimmed = digits.trim_start_matches('0');
    if trimmed.len() > 13 {
        return Err(NumberError::OutOfRange {
            value: digits.to_string(),
        });
    }
    let value = if trimmed.is_empty() {
        0
    } else {
        trimmed
            .parse::<u64>()
            .map_err(|_| NumberError::Malformed(digits.to_string()))?
    };
    if value > MAX_INTEGER {
        return Err(NumberError::OutOfRange {
            value: digits.to_string(),
        });
    }
    Ok(value)
}

// Unit forms used with a masculine counted noun (they carry ة) and with a
// feminine one. Index = value.
const UNITS_FOR_MASC: [&str; 11] = [
    "", "واحد", "", "ثلاثة", "أربعة", "خمسة", "ستة", "سبعة", "ثمانية", "تسعة", "عشرة",
];
const UNITS_FOR_FEM: [&str; 11] = [
    "", "واحدة", "", "ثلاث", "أربع", "خمس", "ست", "سبع", "ثماني", "تسع", "عشر",
];
const TENS_NOM: [&str; 10] = [
    "", "", "عشرون", "ثلاثون", "أربعون", "خمسون", "ستون", "سبعون", "ثمانون", "تسعون",
];
const TENS_ACC: [&str; 10] = [
    "", "", "عشرين", "ثلاثين", "أربعين", "خمسين", "ستين", "سبعين", "ثمانين", "تسعين",
];
const HUNDREDS: [&str; 10] = [
    "", "مئة", "", "ثلاثمئة", "أربعمئة", "خمسمئة", "ستمئة", "سبعمئة", "ثمانمئة", "تسعمئة",
];

#[derive(Clone, Copy)]
struct ScaleNoun {
    singular: &'static str,
    dual_nom: &'static str,
    dual_acc: &'static str,
    plural: &'static str,
    /// Accusative singular used after 11–99.
    tamyiz: &'static str,
}

const THOUSAND: ScaleNoun = ScaleNoun {
    singular: "ألف",
    dual_nom: "ألفان",
    dual_acc: "ألفين",
    plural: "آلاف",
    tamyiz: "ألفا",
};
const MILLION: ScaleNoun = ScaleNoun {
    singular: "مليون",
    dual_nom: "مليونان",
    dual_acc: "مليونين",
    plural: "ملايين",
    tamyiz: "مليونا",
};
const BILLION: ScaleNoun = ScaleNoun {
    singular: "مليار",
    dual_nom: "ملياران",
    dual_acc: "مليارين",
    plural: "مليارات",
    tamyiz: "مليارا",
};

impl ScaleNoun {
    fn dual(self, case: Case) -> &'static str {
        match case {
            Case::Nominative => self.dual_nom,
            Case::AccusativeGenitive => self.dual_acc,
        }
    }
}

/// One output word; `conjoined` words get the "و" prefix when rendered and
/// `definable` words take "ال" in definite spellings.
#[derive(Debug, Clone)]
struct Piece {
    word: &'static str,
    conjoined: bool,
    definable: bool,
}

impl Piece {
    fn head(word: &'static str) -> Self {
        Piece {
            word,
            conjoined: false,
            definable: true,
        }
    }

    fn tail(word: &'static str) -> Self {
        Piece {
            word,
            conjoined: false,
            definable: false,
        }
    }
}

fn conjoin(mut group: Vec<Piece>) -> Vec<Piece> {
    if let Some(first) = group.first_mut() {
        first.conjoined = true;
    }
    group
}

fn render(pieces: Vec<Piece>, definite: bool) -> Vec<String> {
    pieces
        .into_iter()
        .map(|p| {
            let mut w = String::new();
            if p.conjoined {
                w.push('و');
            }
            if definite && p.definable {
                w.push_str("ال");
            }
            w.push_str(p.word);
            w
        })
        .collect()
}

fn two(gender: Gender, case: Case) -> &'static str {
    match (gender, case) {
        (Gender::Masculine, Case::Nominative) => "اثنان",
        (Gender::Masculine, Case::AccusativeGenitive) => "اثنين",
        (Gender::Feminine, Case::Nominative) => "اثنتان",
        (Gender::Feminine, Case::AccusativeGenitive) => "اثنتين",
    }
}

fn unit(n: u64, gender: Gender) -> &'static str {
    match gender {
        Gender::Masculine => UNITS_FOR_MASC[n as usize],
        Gender::Feminine => UNITS_FOR_FEM[n as usize],
    }
}

fn below_hundred(n: u64, a: Agreement) -> Vec<Piece> {
    debug_assert!((1..100).contains(&n));
    let Agreement { gender, case } = a;
    match n {
        1 | 3..=10 => vec![Piece::head(unit(n, gender))],
        2 => vec![Piece::head(two(gender, case))],
        11 => match gender {
            Gender::Masculine => vec![Piece::head("أحد"), Piece::tail("عشر")],
            Gender::Feminine => vec![Piece::head("إحدى"), Piece::tail("عشرة")],
        },
        12 => {
            let head = match (gender, case) {
                (Gender::Masculine, Case::Nominative) => "اثنا",
                (Gender::Masculine, Case::AccusativeGenitive) => "اثني",
                (Gender::Feminine, Case::Nominative) => "اثنتا",
                (Gender::Feminine, Case::AccusativeGenitive) => "اثنتي",
            };
            vec![Piece::head(head), Piece::tail(teen_ten(gender))]
        }
        13..=19 => vec![Piece::head(unit(n - 10, gender)), Piece::tail(teen_ten(gender))],
        _ => {
            let tens = match case {
                Case::Nominative => TENS_NOM[(n / 10) as usize],
                Case::AccusativeGenitive => TENS_ACC[(n / 10) as usize],
            };
            let units = n % 10;
            if units == 0 {
                return vec![Piece::head(tens)];
            }
            let head = match (units, gender) {
                (1, Gender::Masculine) => "واحد",
                (1, Gender::Feminine) => "إحدى",
                (2, _) => two(gender, case),
                (u, g) => unit(u, g),
            };
            let mut out = vec![Piece::head(head)];
            out.extend(conjoin(vec![Piece::head(tens)]));
            out
        }
    }
}

/// The "عشر" of a compound teen agrees with the counted noun.
fn teen_ten(gender: Gender) -> &'static str {
    match gender {
        Gender::Masculine => "عشر",
        Gender::Feminine => "عشرة",
    }
}

/// 1..=999. `construct` selects the annexed dual (مئتا/مئتي) used when a
/// bare 200 is followed by a scale noun.
fn below_thousand(n: u64, a: Agreement, construct: bool) -> Vec<Piece> {
    debug_assert!((1..1000).contains(&n));
    let hundreds = n / 100;
    let rest = n % 100;
    let mut out = Vec::new();
    if hundreds > 0 {
        let word = if hundreds == 2 {
            match (construct && rest == 0, a.case) {
                (true, Case::Nominative) => "مئتا",
                (true, Case::AccusativeGenitive) => "مئتي",
                (false, Case::Nominative) => "مئتان",
                (false, Case::AccusativeGenitive) => "مئتين",
            }
        } else {
            HUNDREDS[hundreds as usize]
        };
        out.push(Piece::head(word));
    }
    if rest > 0 {
        let group = below_hundred(rest, a);
        if out.is_empty() {
            out = group;
        } else {
            out.extend(conjoin(group));
        }
    }
    out
}

/// Count (1..=1000) of a scale noun, e.g. the 3 in ثلاثة آلاف.
fn scaled(count: u64, noun: ScaleNoun, case: Case) -> Vec<Piece> {
    // Scale nouns are masculine.
    let a = Agreement {
        gender: Gender::Masculine,
        case,
    };
    match count {
        1 => vec![Piece::head(noun.singular)],
        2 => vec![Piece::head(noun.dual(case))],
        1000 => vec![Piece::head(THOUSAND.singular), Piece::tail(noun.singular)],
        _ => {
            let last_two = count % 100;
            if count > 100 && (last_two == 1 || last_two == 2) {
                // 101 000 → مئة ألف وألف, 102 000 → مئة ألف وألفان
                let mut out = below_thousand(count - last_two, a, true);
                out.push(Piece::tail(noun.singular));
                let extra = if last_two == 1 {
                    noun.singular
                } else {
                    noun.dual(case)
                };
                out.extend(conjoin(vec![Piece::head(extra)]));
                return out;
            }
            let mut out = below_thousand(count, a, true);
            let form = match last_two {
                3..=10 => noun.plural,
                11..=99 => noun.tamyiz,
                _ => noun.singular,
            };
            out.push(Piece::tail(form));
            out
        }
    }
}

fn pieces(n: u64, a: Agreement) -> Vec<Piece> {
    if n == 0 {
        return vec![Piece::head("صفر")];
    }
    let groups = [
        (n / 1_000_000_000, Some(BILLION)),
        ((n / 1_000_000) % 1000, Some(MILLION)),
        ((n / 1000) % 1000, Some(THOUSAND)),
        (n % 1000, None),
    ];
    let mut out: Vec<Piece> = Vec::new();
    for (count, noun) in groups {
        if count == 0 {
            continue;
        }
        let group = match noun {
            Some(noun) => scaled(count, noun, a.case),
            None => below_thousand(count, a, false),
        };
        if out.is_empty() {
            out = group;
        } else {
            out.extend(conjoin(group));
        }
    }
    out
}

/// Spell `n` (0..=10^12) in agreement with a counted noun of the given
/// gender and case.
pub fn spell_integer(n: u64, gender: Gender, case: Case) -> Result<Vec<String>, NumberError> {
    spell_integer_with(n, Agreement { gender, case }, false)
}

pub(crate) fn spell_integer_with(
    n: u64,
    a: Agreement,
    definite: bool,
) -> Result<Vec<String>, NumberError> {
    if n > MAX_INTEGER {
        return Err(NumberError::OutOfRange {
            value: n.to_string(),
        });
    }
    Ok(render(pieces(n, a), definite))
}

/// Denominator for a fraction written with `places` digits.
pub fn denominator_words(places: usize) -> Option<&'static [&'static str]> {
    Some(match places {
        1 => &["العشرة"],
        2 => &["المئة"],
        3 => &["الألف"],
        4 => &["عشرة", "الآلاف"],
        5 => &["مئة", "الألف"],
        6 => &["المليون"],
        _ => return None,
    })
}

/// Spell a decimal as "<integer> و<numerator> جزء من <denominator>".
/// An all-zero fraction is elided. `max_places` bounds the fractional
/// precision (at most [`MAX_SUPPORTED_PLACES`]).
pub fn spell_decimal(spelling: &NumberSpelling, max_places: u8) -> Result<Vec<String>, NumberError> {
    let max = max_places.min(MAX_SUPPORTED_PLACES);
    let places = spelling.value.fraction.len();
    if places > max as usize {
        return Err(NumberError::PrecisionOverflow { digits: places, max });
    }
    let mut words = spell_integer_with(
        spelling.value.integer,
        spelling.agreement(),
        spelling.definite,
    )?;
    if spelling.value.is_integral() {
        return Ok(words);
    }
    let numerator = parse_bounded(&spelling.value.fraction)?;
    // جزء is masculine.
    let parts = Agreement {
        gender: Gender::Masculine,
        case: spelling.case,
    };
    words.extend(render(conjoin(pieces(numerator, parts)), false));
    words.push("جزء".into());
    words.push("من".into());
    words.extend(
        denominator_words(places)
            .expect("places bounded above")
            .iter()
            .map(|w| w.to_string()),
    );
    Ok(words)
}

struct FractionNoun {
    singular: &'static str,
    dual_nom: &'static str,
    dual_acc: &'static str,
    plural: &'static str,
}

const FRACTION_NOUNS: [FractionNoun; 9] = [
    FractionNoun { singular: "نصف", dual_nom: "نصفان", dual_acc: "نصفين", plural: "أنصاف" },
    FractionNoun { singular: "ثلث", dual_nom: "ثلثان", dual_acc: "ثلثين", plural: "أثلاث" },
    FractionNoun { singular: "ربع", dual_nom: "ربعان", dual_acc: "ربعين", plural: "أرباع" },
    FractionNoun { singular: "خمس", dual_nom: "خمسان", dual_acc: "خمسين", plural: "أخماس" },
    FractionNoun { singular: "سدس", dual_nom: "سدسان", dual_acc: "سدسين", plural: "أسداس" },
    FractionNoun { singular: "سبع", dual_nom: "سبعان", dual_acc: "سبعين", plural: "أسباع" },
    FractionNoun { singular: "ثمن", dual_nom: "ثمنان", dual_acc: "ثمنين", plural: "أثمان" },
    FractionNoun { singular: "تسع", dual_nom: "تسعان", dual_acc: "تسعين", plural: "أتساع" },
    FractionNoun { singular: "عشر", dual_nom: "عشران", dual_acc: "عشرين", plural: "أعشار" },
];

/// Spell a common fraction. Denominators 2..=10 use the fraction nouns
/// (نصف, ثلث, ربع …); anything else reads as "<numerator> على <denominator>".
pub fn spell_fraction(numerator: u64, denominator: u64, case: Case) -> Result<Vec<String>, NumberError> {
    let masc = Agreement {
        gender: Gender::Masculine,
        case,
    };
    if (2..=10).contains(&denominator) && (1..=10).contains(&numerator) {
        let noun = &FRACTION_NOUNS[(denominator - 2) as usize];
        return Ok(match numerator {
            1 => vec![noun.singular.to_string()],
            2 => vec![match case {
                Case::Nominative => noun.dual_nom,
                Case::AccusativeGenitive => noun.dual_acc,
            }
            .to_string()],
            n => {
                let mut words = spell_integer_with(n, masc, false)?;
                words.push(noun.plural.to_string());
                words
            }
        });
    }
    let mut words = spell_integer_with(numerator, masc, false)?;
    words.push("على".into());
    words.extend(spell_integer_with(denominator, masc, false)?);
    Ok(words)
}

/// Read a digit string one digit at a time (fallback for values that cannot
/// be spelled as a single number).
pub fn spell_digits(ascii_digits: &str) -> Vec<String> {
    ascii_digits
        .bytes()
        .filter(u8::is_ascii_digit)
        .map(|b| {
            let d = (b - b'0') as u64;
            render(
                pieces(
                    d,
                    Agreement {
                        gender: Gender::Masculine,
                        case: Case::Nominative,
                    },
                ),
                false,
            )
            .remove(0)
        })
        .collect()
}
