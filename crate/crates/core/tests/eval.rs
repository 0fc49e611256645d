use std::collections::BTreeMap;
use std::time::Duration;

use natiq_core::eval::{
    aggregate_mos, build_pool, measure_rtf, rater_names, RtfMeasurement, DEFAULT_PER_RATER,
};
use natiq_core::par::Exec;
use natiq_core::synth::{ReferenceSynthesizer, SynthesisRequest, Synthesizer, VoiceSpec};

fn strings(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

#[test]
fn pool_of_600_and_reproducible_assignment() {
    let sentences = strings("جملة ", 100);
    let models = vec!["tacotron1".to_string(), "tacotron2".into(), "espnet".into()];
    let voices = vec!["amina".to_string(), "hamza".into()];
    let mut study = build_pool(&sentences, &models, &voices, |it| Ok(format!("{}.wav", it.id)), Exec::default());
    assert_eq!(study.pool.len(), 600);
    let again = build_pool(&sentences, &models, &voices, |it| Ok(format!("{}.wav", it.id)), Exec::Sequential);
    assert_eq!(again.pool, study.pool);

    let raters = rater_names(14);
    study.assign_raters(&raters, DEFAULT_PER_RATER, 2024).unwrap();
    assert_eq!(study.assignment_rows(), 210);
    for picks in study.assignments.values() {
        let mut unique = picks.clone();
        unique.sort();
        unique.dedup();
        assert_eq!(unique.len(), 15);
    }
    let mut other = again;
    other.assign_raters(&raters, DEFAULT_PER_RATER, 2024).unwrap();
    assert_eq!(other.assignments, study.assignments);
    other.assign_raters(&raters, DEFAULT_PER_RATER, 2025).unwrap();
    assert_ne!(other.assignments, study.assignments);
}

#[test]
fn known_cell_means_are_recovered() {
    let sentences = strings("s", 30);
    let models = vec!["m1".to_string(), "m2".into(), "m3".into()];
    let voices = vec!["amina".to_string(), "hamza".into()];
    let mut study = build_pool(&sentences, &models, &voices, |it| Ok(it.id.clone()), Exec::default());
    let raters = rater_names(14);
    study.assign_raters(&raters, 15, 11).unwrap();

    // Each cell gets a fixed score pattern whose mean is known in advance.
    let patterns: BTreeMap<(&str, &str), [u8; 2]> = [
        (("m1", "amina"), [4, 5]),
        (("m1", "hamza"), [3, 3]),
        (("m2", "amina"), [5, 5]),
        (("m2", "hamza"), [2, 4]),
        (("m3", "amina"), [1, 2]),
        (("m3", "hamza"), [4, 4]),
    ]
    .into_iter()
    .collect();
    let label: BTreeMap<String, (String, String)> = study
        .pool
        .iter()
        .map(|e| (e.id.clone(), (e.model.clone(), e.voice.clone())))
        .collect();
    let mut expected: BTreeMap<(String, String), (u64, usize)> = BTreeMap::new();
    let assignments = study.assignments.clone();
    for (rater, samples) in &assignments {
        for s in samples {
            let (m, v) = &label[s];
            let p = patterns[&(m.as_str(), v.as_str())];
            let e = expected.entry((m.clone(), v.clone())).or_default();
            let score = p[e.1 % 2];
            e.0 += score as u64;
            e.1 += 1;
            study.rate(rater, s, score).unwrap();
        }
    }
    let cells = aggregate_mos(&study);
    assert_eq!(cells.len(), 6);
    for c in cells {
        let (sum, n) = expected[&(c.model.clone(), c.voice.clone())];
        assert_eq!(c.count, n);
        assert_eq!(c.mean, Some(sum as f64 / n as f64));
    }
}

#[test]
fn injected_delay_is_recovered() {
    let text = "كَتَبَ الوَلَدُ الدَّرْسَ ".repeat(12);
    let req = SynthesisRequest::from_text(text.trim(), VoiceSpec::hamza(), 22_050).unwrap();
    let base = ReferenceSynthesizer::new().synthesize(&req).unwrap();
    let delay = 1.0;
    let slow = ReferenceSynthesizer::new().with_delay(Duration::from_secs_f64(delay));
    let m = measure_rtf(&slow, &req).unwrap();
    let expected = (delay + base.timing_s) / base.waveform.duration_s();
    assert!((m.rtf / expected - 1.0).abs() <= 0.05, "{} vs {expected}", m.rtf);
    assert!(m.real_time);
}

#[test]
fn real_time_flag_boundary() {
    assert!(RtfMeasurement::new(5.0, 5.0).unwrap().real_time);
    assert!(!RtfMeasurement::new(5.000001, 5.0).unwrap().real_time);
}
