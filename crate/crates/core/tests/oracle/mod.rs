//! Reference implementations used as test oracles. Written separately from
//! the library code and shared with the CLI acceptance suite.

#![allow(dead_code)]

use std::collections::HashMap;

pub const CARDINALS_TSV: &str = include_str!("../data/cardinals_0_99.tsv");

/// Column order in the table: masc nom, masc acc/gen, fem nom, fem acc/gen.
pub fn cardinal_table() -> Vec<(u64, [String; 4])> {
    CARDINALS_TSV
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let cols: Vec<&str> = l.split('\t').collect();
            assert_eq!(cols.len(), 5, "bad table row: {l}");
            let n = cols[0].parse().unwrap();
            (n, std::array::from_fn(|i| cols[i + 1].to_string()))
        })
        .collect()
}

pub fn column(feminine: bool, accusative: bool) -> usize {
    (feminine as usize) * 2 + accusative as usize
}

/// Compositional spelling for 0..=999 999 built on the 0–99 table.
pub struct Composer {
    table: HashMap<u64, [String; 4]>,
}

impl Composer {
    pub fn new() -> Self {
        Composer {
            table: cardinal_table().into_iter().collect(),
        }
    }

    fn small(&self, n: u64, feminine: bool, acc: bool) -> String {
        self.table[&n][column(feminine, acc)].clone()
    }

    fn hundreds(&self, n: u64, feminine: bool, acc: bool, construct: bool) -> String {
        let h = n / 100;
        let r = n % 100;
        let hw = match h {
            0 => None,
            1 => Some("مئة"),
            2 if construct && r == 0 => Some(if acc { "مئتي" } else { "مئتا" }),
            2 => Some(if acc { "مئتين" } else { "مئتان" }),
            3 => Some("ثلاثمئة"),
            4 => Some("أربعمئة"),
            5 => Some("خمسمئة"),
            6 => Some("ستمئة"),
            7 => Some("سبعمئة"),
            8 => Some("ثمانمئة"),
            9 => Some("تسعمئة"),
            _ => unreachable!(),
        };
        match (hw, r) {
            (None, r) => self.small(r, feminine, acc),
            (Some(h), 0) => h.to_string(),
            (Some(h), r) => format!("{h} و{}", self.small(r, feminine, acc)),
        }
    }

    fn thousands(&self, t: u64, acc: bool) -> String {
        let dual = if acc { "ألفين" } else { "ألفان" };
        match t {
            1 => "ألف".into(),
            2 => dual.into(),
            3..=10 => format!("{} آلاف", self.small(t, false, acc)),
            11..=99 => format!("{} ألفا", self.small(t, false, acc)),
            _ => match t % 100 {
                0 => format!("{} ألف", self.hundreds(t, false, acc, true)),
                1 => format!("{} ألف وألف", self.hundreds(t - 1, false, acc, true)),
                2 => format!("{} ألف و{dual}", self.hundreds(t - 2, false, acc, true)),
                3..=10 => format!("{} آلاف", self.hundreds(t, false, acc, false)),
                _ => format!("{} ألفا", self.hundreds(t, false, acc, false)),
            },
        }
    }

    pub fn spell(&self, n: u64, feminine: bool, acc: bool) -> String {
        assert!(n < 1_000_000);
        let (t, u) = (n / 1000, n % 1000);
        match (t, u) {
            (0, u) if u < 100 => self.small(u, feminine, acc),
            (0, u) => self.hundreds(u, feminine, acc, false),
            (t, 0) => self.thousands(t, acc),
            (t, u) => format!(
                "{} و{}",
                self.thousands(t, acc),
                self.hundreds(u, feminine, acc, false)
            ),
        }
    }
}

/// Edit distance by exhaustive search over alignments. A leading match is
/// always taken, which never increases the optimum.
pub fn brute_edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    if a[0] == b[0] {
        return brute_edit_distance(&a[1..], &b[1..]);
    }
    1 + brute_edit_distance(&a[1..], b)
        .min(brute_edit_distance(a, &b[1..]))
        .min(brute_edit_distance(&a[1..], &b[1..]))
}

/// Every string of length 0..=max_len over the alphabet.
pub fn all_strings(alphabet: &[char], max_len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|s| alphabet.iter().map(move |c| format!("{s}{c}")))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Unicode range of harakat used by the fuzzers.
pub const HARAKAT: [char; 8] = [
    '\u{064B}', '\u{064C}', '\u{064D}', '\u{064E}', '\u{064F}', '\u{0650}', '\u{0651}', '\u{0652}',
];

/// Skeleton computed by filtering code points, independent of the library.
pub fn skeleton(s: &str) -> String {
    s.chars()
        .filter(|c| !HARAKAT.contains(c) && *c != '\u{0640}')
        .collect()
}
