use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use natiq_core::eval::{score_corpus, Metric, ScoreOptions, ScoredPair};
use natiq_core::par::Exec;
use natiq_core::segmenter::{detect_silences_with, synthetic};
use natiq_core::synth::{encode, mel, vocode_with, SynthesisRequest, VoiceSpec};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn vocoder(c: &mut Criterion) {
    let text = "وَقَالَ الأُسْتَاذُ الدُّكْتُورُ مَاجِد ".repeat(4);
    let req = SynthesisRequest::from_text(text.trim(), VoiceSpec::amina(), 22_050).unwrap();
    let mel = encode(&req).unwrap();
    let mut g = c.benchmark_group("vocode");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| vocode_with(&mel, exec).unwrap())
        });
    }
    g.finish();
}

fn mel_analysis(c: &mut Criterion) {
    let corpus = synthetic::corpus(5, 2.0, 3.0, 0.4, 22_050, 1);
    let mut g = c.benchmark_group("mel_analysis");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| mel::analyze(&corpus.waveform, exec))
        });
    }
    g.finish();
}

fn silences(c: &mut Criterion) {
    let corpus = synthetic::corpus(20, 3.0, 9.0, 0.5, 16_000, 2);
    let mut g = c.benchmark_group("detect_silences");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| detect_silences_with(&corpus.waveform, -40.0, 0.25, exec).unwrap())
        });
    }
    g.finish();
}

fn scoring(c: &mut Criterion) {
    let pairs: Vec<ScoredPair> = (0..500)
        .map(|i| ScoredPair {
            id: i.to_string(),
            reference: "ذَهَبَ الوَلَدُ إِلَى المَدْرَسَةِ فِي الصَّبَاحِ البَاكِرِ".into(),
            hypothesis: if i % 2 == 0 { "ذهب الولد المدرسة في الصباح" } else { "ذهب ولد الى المدرسه صباحا" }.into(),
        })
        .collect();
    let mut g = c.benchmark_group("score_corpus_cer");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| score_corpus(&pairs, Metric::Cer, ScoreOptions::default(), exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, vocoder, mel_analysis, silences, scoring);
criterion_main!(benches);
