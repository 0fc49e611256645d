mod oracle;

use natiq_core::align::{align, edit_distance};
use natiq_core::diacritizer::{
    canonical_order, diacritize_str, strip_diacritics, validate_diacritization, DiacritizerBackend,
    FailurePolicy, TableBackend,
};
use natiq_core::eval::{char_error_rate, default_normalize, word_error_rate};
use natiq_core::normalizer::{normalize_str, NormalizerConfig};
use natiq_core::synth::{encode, SynthesisRequest, VoiceSpec};
use oracle::{brute_edit_distance, skeleton, HARAKAT};
use proptest::prelude::*;

fn raw_text() -> impl Strategy<Value = String> {
    let piece = prop_oneof![
        "[ا-ي]{1,6}",
        "[0-9]{1,7}",
        "[0-9]{1,3}\\.[0-9]{1,6}",
        "[0-9]{1,2}/[0-9]{1,2}",
        "[0-9]{1,2}/[0-9]{1,2}/[0-9]{4}",
        "[٠-٩]{1,4}",
        Just("أ. د.".to_string()),
        Just("ص.ب.".to_string()),
        "[a-z]{1,4}",
        "[،.؟!:]",
    ];
    prop::collection::vec(piece, 0..10).prop_map(|v| v.join(" "))
}

fn vocalized_word() -> impl Strategy<Value = String> {
    prop::collection::vec(("[ا-ي]", prop::option::of(0usize..8)), 1..8).prop_map(|letters| {
        letters
            .into_iter()
            .map(|(l, m)| match m {
                Some(i) => format!("{l}{}", HARAKAT[i]),
                None => l,
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn normalization_is_idempotent_and_digit_free(raw in raw_text()) {
        let cfg = NormalizerConfig::default();
        let once = normalize_str(&raw, &cfg);
        prop_assert!(!once.text.chars().any(|c| c.is_ascii_digit() || ('٠'..='٩').contains(&c)), "{}", once.text);
        let twice = normalize_str(&once.text, &cfg);
        prop_assert_eq!(&twice.text, &once.text);
        prop_assert!(twice.trace.iter().all(|t| !t.is_expansion()));
    }

    #[test]
    fn trace_spans_cover_numeric_input(raw in raw_text()) {
        let out = normalize_str(&raw, &NormalizerConfig::default());
        let chars: Vec<char> = raw.chars().collect();
        let text: Vec<char> = out.text.chars().collect();
        for t in &out.trace {
            let surface: String = chars[t.input.start..t.input.end].iter().collect();
            prop_assert_eq!(&surface, &t.surface);
            prop_assert!(t.output.end <= text.len());
        }
        let digits_in = chars.iter().filter(|c| c.is_ascii_digit()).count();
        let covered: usize = out.trace.iter()
            .map(|t| t.surface.chars().filter(|c| c.is_ascii_digit()).count())
            .sum();
        prop_assert_eq!(digits_in, covered);
    }

    #[test]
    fn strip_is_idempotent_and_matches_skeleton(words in prop::collection::vec(vocalized_word(), 1..6)) {
        let s = words.join(" ");
        let once = strip_diacritics(&s);
        prop_assert_eq!(strip_diacritics(&once), once.clone());
        prop_assert_eq!(once, skeleton(&s));
    }

    #[test]
    fn backend_output_strips_to_input(words in prop::collection::vec(vocalized_word(), 1..6)) {
        let vocalized: Vec<String> = words.iter().map(|w| canonical_order(w)).filter(|w| validate_diacritization(w).is_empty()).collect();
        prop_assume!(!vocalized.is_empty());
        let backend = TableBackend::new(vocalized.iter().map(|w| (skeleton(w), w.clone())));
        let input = vocalized.iter().map(|w| skeleton(w)).collect::<Vec<_>>().join(" ");
        let out = backend.diacritize(&input).unwrap();
        prop_assert_eq!(strip_diacritics(&out), input.clone());
        let text = diacritize_str(&input, &backend, FailurePolicy::Fail).unwrap();
        prop_assert_eq!(text.skeleton(), input);
    }

    #[test]
    fn leading_mark_is_detected(word in vocalized_word(), i in 0usize..8) {
        let broken = format!("{}{}", HARAKAT[i], word);
        prop_assert!(!validate_diacritization(&broken).is_empty());
        let detached = format!("{word} {}", HARAKAT[i]);
        prop_assert!(!validate_diacritization(&detached).is_empty());
    }

    #[test]
    fn edit_distance_matches_brute_force(a in "[abc]{0,8}", b in "[abc]{0,8}") {
        let (ac, bc): (Vec<char>, Vec<char>) = (a.chars().collect(), b.chars().collect());
        let expected = brute_edit_distance(&ac, &bc);
        prop_assert_eq!(edit_distance(&ac, &bc), expected);
        let ta: Vec<String> = ac.iter().map(|c| c.to_string()).collect();
        let tb: Vec<String> = bc.iter().map(|c| c.to_string()).collect();
        let trace = align(&ta, &tb);
        prop_assert_eq!(trace.errors(), expected);
        prop_assert_eq!(trace.matches + trace.substitutions + trace.deletions, ta.len());
        prop_assert_eq!(trace.matches + trace.substitutions + trace.insertions, tb.len());
    }

    #[test]
    fn edit_cost_triangle(a in "[abc]{0,7}", b in "[abc]{0,7}", c in "[abc]{0,7}") {
        let v = |s: &str| s.chars().collect::<Vec<_>>();
        let (a, b, c) = (v(&a), v(&b), v(&c));
        prop_assert!(edit_distance(&a, &c) <= edit_distance(&a, &b) + edit_distance(&b, &c));
    }

    #[test]
    fn self_error_rate_is_zero(words in prop::collection::vec(vocalized_word(), 1..6)) {
        let s = words.join(" ");
        prop_assume!(!default_normalize(&s).is_empty());
        prop_assert_eq!(word_error_rate(&s, &s, default_normalize).unwrap().percent, 0.0);
        prop_assert_eq!(char_error_rate(&s, &s, default_normalize).unwrap().percent, 0.0);
    }

    #[test]
    fn frame_counts_add_up(a in vocalized_word(), b in vocalized_word()) {
        let frames = |t: &str| {
            SynthesisRequest::from_text(t, VoiceSpec::hamza(), 22_050)
                .ok()
                .and_then(|r| encode(&r).ok())
                .map(|m| m.n_frames())
        };
        let joined = format!("{a}{b}");
        if let (Some(fa), Some(fb), Some(fab)) = (frames(&a), frames(&b), frames(&joined)) {
            prop_assert!(fab <= fa + fb && fab + 1 >= fa + fb, "{fa}+{fb} vs {fab}");
        }
    }
}
