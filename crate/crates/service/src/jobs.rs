use std::time::{SystemTime, UNIX_EPOCH};

use natiq_core::diacritizer::DiacritizationSource;
use serde::{Deserialize, Serialize};
use uuid::Uuid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JobState {
    Queued,
    Running,
    Done,
    Failed,
}

impl JobState {
    /// Allowed moves: queued → running → done | failed.
    pub fn can_become(self, next: JobState) -> bool {
        matches!(
            (self, next),
            (JobState::Queued, JobState::Running)
                | (JobState::Running, JobState::Done)
                | (JobState::Running, JobState::Failed)
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub normalize_s: f64,
    pub diacritize_s: f64,
    pub synth_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisJob {
    pub id: Uuid,
    pub session_id: String,
    pub input_text: String,
    pub voice: String,
    pub state: JobState,
    /// Milliseconds since the Unix epoch.
    pub created_at: u64,
    pub normalized: String,
    pub diacritized: String,
    pub diacritization_source: DiacritizationSource,
    /// Storage key of the WAV; present iff `state == done`.
    pub audio_ref: Option<String>,
    pub timings: Timings,
    pub audio_duration_s: Option<f64>,
    pub sample_rate: u32,
    pub rtf: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BadTransition {
    pub from: JobState,
    pub to: JobState,
}

impl SynthesisJob {
    pub fn key(&self) -> String {
        self.id.to_string()
    }

    pub fn transition(&mut self, to: JobState) -> Result<(), BadTransition> {
        if !self.state.can_become(to) {
            return Err(BadTransition {
                from: self.state,
                to,
            });
        }
        self.state = to;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub session_id: String,
    pub job_ids: Vec<Uuid>,
    pub created_at: u64,
}

pub fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}
