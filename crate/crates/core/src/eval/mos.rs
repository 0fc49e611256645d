//! MOS listening-study management: pool building, rater assignment, rating
//! collection and per-cell aggregation.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use tracing::warn;

use super::EvalError;
use crate::par::Exec;

pub const DEFAULT_PER_RATER: usize = 15;

/// What to synthesize for one pool cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoolItem {
    pub id: String,
    pub sentence_index: usize,
    pub sentence: String,
    pub model: String,
    pub voice: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolEntry {
    pub id: String,
    pub sentence_index: usize,
    pub model: String,
    pub voice: String,
    /// Where the synthesized audio lives (path or storage key).
    pub audio: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolSkip {
    pub id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rating {
    pub rater: String,
    pub sample: String,
    pub score: u8,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MosStudy {
    pub pool: Vec<PoolEntry>,
    #[serde(default)]
    pub skipped: Vec<PoolSkip>,
    #[serde(default)]
    pub raters: Vec<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub assignments: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub ratings: Vec<Rating>,
}

/// Cell id: sentence-major, then model, then voice.
pub fn pool_id(sentence_index: usize, model: &str, voice: &str) -> String {
    format!("s{:03}_{model}_{voice}", sentence_index + 1)
}

/// Synthesize every sentence × model × voice cell. Failures are logged and
/// recorded as skips; the pool order is independent of execution order.
pub fn build_pool<F>(
    sentences: &[String],
    models: &[String],
    voices: &[String],
    synth_fn: F,
    exec: Exec,
) -> MosStudy
where
    F: Fn(&PoolItem) -> Result<String, String> + Sync + Send,
{
    let mut items = Vec::with_capacity(sentences.len() * models.len() * voices.len());
    for (si, sentence) in sentences.iter().enumerate() {
        for model in models {
            for voice in voices {
                items.push(PoolItem {
                    id: pool_id(si, model, voice),
                    sentence_index: si,
                    sentence: sentence.clone(),
                    model: model.clone(),
                    voice: voice.clone(),
                });
            }
        }
    }
    let results = exec.map(&items, |item| synth_fn(item));
    let mut study = MosStudy::default();
    for (item, res) in items.into_iter().zip(results) {
        match res {
            Ok(audio) => study.pool.push(PoolEntry {
                id: item.id,
                sentence_index: item.sentence_index,
                model: item.model,
                voice: item.voice,
                audio,
            }),
            Err(reason) => {
                warn!(id = %item.id, %reason, "pool entry skipped");
                study.skipped.push(PoolSkip {
                    id: item.id,
                    reason,
                });
            }
        }
    }
    study
}

/// `rater_01`, `rater_02`, …
pub fn rater_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("rater_{i:02}")).collect()
}

impl MosStudy {
    /// Give each rater `n_per_rater` distinct samples, drawn with a ChaCha8
    /// stream seeded once and consumed in rater order.
    pub fn assign_raters(
        &mut self,
        raters: &[String],
        n_per_rater: usize,
        seed: u64,
    ) -> Result<(), EvalError> {
        if self.pool.is_empty() {
            return Err(EvalError::Study("pool is empty".into()));
        }
        if n_per_rater > self.pool.len() {
            return Err(EvalError::Study(format!(
                "cannot draw {n_per_rater} samples from a pool of {}",
                self.pool.len()
            )));
        }
        let unique: BTreeSet<&String> = raters.iter().collect();
        if unique.len() != raters.len() {
            return Err(EvalError::Study("duplicate rater names".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut assignments = BTreeMap::new();
        for r in raters {
            let picks = sample(&mut rng, self.pool.len(), n_per_rater)
                .into_iter()
                .map(|i| self.pool[i].id.clone())
                .collect();
            assignments.insert(r.clone(), picks);
        }
        self.raters = raters.to_vec();
        self.seed = Some(seed);
        self.assignments = assignments;
        self.ratings.clear();
        Ok(())
    }

    pub fn assignment_rows(&self) -> usize {
        self.assignments.values().map(Vec::len).sum()
    }

    /// Record (or replace) a rater's score for an assigned sample.
    pub fn rate(&mut self, rater: &str, sample: &str, score: u8) -> Result<(), EvalError> {
        if !(1..=5).contains(&score) {
            return Err(EvalError::Study(format!("score {score} outside 1..5")));
        }
        let assigned = self
            .assignments
            .get(rater)
            .ok_or_else(|| EvalError::Study(format!("unknown rater `{rater}`")))?;
        if !assigned.iter().any(|s| s == sample) {
            return Err(EvalError::Study(format!(
                "sample `{sample}` is not assigned to `{rater}`"
            )));
        }
        match self
            .ratings
            .iter_mut()
            .find(|r| r.rater == rater && r.sample == sample)
        {
            Some(r) => r.score = score,
            None => self.ratings.push(Rating {
                rater: rater.to_string(),
                sample: sample.to_string(),
                score,
            }),
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, EvalError> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| EvalError::Parse(format!("{}: {e}", path.display())))
    }

    /// Write through a sibling temp file and rename, so a crash never leaves
    /// a half-written study.
    pub fn save(&self, path: &Path) -> Result<(), EvalError> {
        let tmp = path.with_extension("json.tmp");
        let json = serde_json::to_string_pretty(self).expect("study serializes");
        std::fs::write(&tmp, json)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }
}

/// Mean score for one (model, voice) cell; `mean` is `None` when the cell
/// has no ratings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MosCell {
    pub model: String,
    pub voice: String,
    pub mean: Option<f64>,
    pub count: usize,
}

pub fn aggregate_mos(study: &MosStudy) -> Vec<MosCell> {
    let cell_of: BTreeMap<&str, (&str, &str)> = study
        .pool
        .iter()
        .map(|e| (e.id.as_str(), (e.model.as_str(), e.voice.as_str())))
        .collect();
    let mut sums: BTreeMap<(&str, &str), (u64, usize)> = BTreeMap::new();
    for e in &study.pool {
        sums.entry((e.model.as_str(), e.voice.as_str())).or_default();
    }
    for r in &study.ratings {
        if let Some(&cell) = cell_of.get(r.sample.as_str()) {
            let s = sums.entry(cell).or_default();
            s.0 += r.score as u64;
            s.1 += 1;
        }
    }
    sums.into_iter()
        .map(|((model, voice), (sum, count))| MosCell {
            model: model.to_string(),
            voice: voice.to_string(),
            mean: (count > 0).then(|| sum as f64 / count as f64),
            count,
        })
        .collect()
}
