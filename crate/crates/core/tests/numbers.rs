mod oracle;

use natiq_core::normalizer::{
    normalize_str, spell_decimal, spell_integer, Agreement, Case, DecimalValue, Gender,
    NormalizerConfig, NumberSpelling,
};
use oracle::{cardinal_table, column, Composer};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const COMBOS: [(Gender, Case, bool, bool); 4] = [
    (Gender::Masculine, Case::Nominative, false, false),
    (Gender::Masculine, Case::AccusativeGenitive, false, true),
    (Gender::Feminine, Case::Nominative, true, false),
    (Gender::Feminine, Case::AccusativeGenitive, true, true),
];

#[test]
fn cardinal_table_all_forms() {
    let table = cardinal_table();
    assert_eq!(table.len(), 100);
    let mut checked = 0;
    for (n, forms) in &table {
        for (g, c, fem, acc) in COMBOS {
            let got = spell_integer(*n, g, c).unwrap().join(" ");
            assert_eq!(got, forms[column(fem, acc)], "n={n} {g:?} {c:?}");
            checked += 1;
        }
    }
    assert_eq!(checked, 400);
}

#[test]
fn compositional_values_to_999_999() {
    let composer = Composer::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for i in 0..100 {
        let n = rng.gen_range(100..1_000_000u64);
        let (g, c, fem, acc) = COMBOS[i % 4];
        assert_eq!(
            spell_integer(n, g, c).unwrap().join(" "),
            composer.spell(n, fem, acc),
            "n={n} {g:?} {c:?}"
        );
    }
}

#[test]
fn composition_edge_cases() {
    let composer = Composer::new();
    for n in [
        100, 101, 110, 111, 200, 212, 999, 1000, 1001, 2000, 2022, 3000, 10_000, 11_000, 99_999,
        100_000, 101_000, 102_000, 103_000, 111_111, 200_000, 202_002, 999_999,
    ] {
        for (g, c, fem, acc) in COMBOS {
            assert_eq!(
                spell_integer(n, g, c).unwrap().join(" "),
                composer.spell(n, fem, acc),
                "n={n}"
            );
        }
    }
}

#[test]
fn abbreviation_sentence_verbatim() {
    let out = normalize_str("وقال أ. د. ماجد", &NormalizerConfig::default());
    assert_eq!(out.text, "وقال الأستاذ الدكتور ماجد");
}

#[test]
fn decimal_sentence_pattern() {
    // The published example reads the fraction digits as "four and thirty";
    // grammatical composition of 43 puts the unit first: "three and forty".
    let out = normalize_str("16.43", &NormalizerConfig::default());
    assert_eq!(out.text, "ستة عشر وثلاثة وأربعين جزء من المئة");
    let spelled = spell_decimal(
        &NumberSpelling::new("16.43".parse::<DecimalValue>().unwrap(), Agreement::default()),
        4,
    )
    .unwrap();
    assert_eq!(spelled.join(" "), out.text);
}

#[test]
fn large_and_out_of_range() {
    let out = normalize_str("10000000000000", &NormalizerConfig::default());
    assert!(!out.text.chars().any(|c| c.is_ascii_digit()));
    assert!(out.trace[0].flag.is_some());
    assert_eq!(
        spell_integer(1_000_000, Gender::Masculine, Case::Nominative).unwrap().join(" "),
        "مليون"
    );
    assert_eq!(
        spell_integer(3_000_000, Gender::Masculine, Case::Nominative).unwrap().join(" "),
        "ثلاثة ملايين"
    );
}
