//! HTTP service for the normalize → diacritize → synthesize pipeline.
//!
//! Routes:
//!
//! | method | path | |
//! |---|---|---|
//! | POST | `/api/synthesize` | `{text, voice}` → `202 {job_id}`; sets the session cookie |
//! | GET | `/api/jobs/{id}` | job document |
//! | GET | `/api/audio/{id}` | WAV of a finished job |
//! | GET | `/api/normalize?text=` | normalized and diacritized preview with trace |
//! | GET | `/api/voices` | configured voices |
//! | GET | `/api/session` | this session's jobs |
//! | POST | `/synthesize` | backend protocol `{text, voice, rate}` → WAV |
//! | POST | `/diacritize` | backend protocol `{text}` → `{diacritized}` |
//!
//! Anything else is served from `static_dir` when configured.

pub mod api;
pub mod config;
pub mod jobs;
pub mod pipeline;
pub mod store;

use std::net::SocketAddr;
use std::sync::Arc;

use tokio::sync::{Mutex, OwnedSemaphorePermit, Semaphore};
use tracing::{error, info, warn};
use uuid::Uuid;

pub use config::{ConfigError, DiacritizerChoice, ServiceConfig, SynthChoice};
pub use jobs::{JobState, SessionRecord, SynthesisJob, Timings};
pub use pipeline::{Pipeline, PipelineError, Preview};
pub use store::{DocumentStore, FileStore, MemoryStore, StoreError};

use store::{get_json, put_json, AUDIO, JOBS, SESSIONS};

#[derive(Clone)]
pub struct AppState {
    inner: Arc<Inner>,
}

struct Inner {
    config: ServiceConfig,
    pipeline: Arc<Pipeline>,
    store: Arc<dyn DocumentStore>,
    workers: Arc<Semaphore>,
    /// Serializes read-modify-write of session documents.
    sessions: Mutex<()>,
}

#[derive(Debug, thiserror::Error)]
pub enum StartError {
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("binding {addr}: {source}")]
    Bind {
        addr: SocketAddr,
        source: std::io::Error,
    },
}

impl AppState {
    pub fn new(config: ServiceConfig, store: Arc<dyn DocumentStore>) -> Result<Self, StartError> {
        let pipeline = Arc::new(Pipeline::from_config(&config)?);
        Ok(AppState {
            inner: Arc::new(Inner {
                workers: Arc::new(Semaphore::new(config.workers.max(1))),
                config,
                pipeline,
                store,
                sessions: Mutex::new(()),
            }),
        })
    }

    /// Store chosen by the config: file-backed when `storage_dir` is set.
    pub fn from_config(config: ServiceConfig) -> Result<Self, StartError> {
        let store: Arc<dyn DocumentStore> = match &config.storage_dir {
            Some(dir) => Arc::new(FileStore::open(dir)?),
            None => Arc::new(MemoryStore::new()),
        };
        Self::new(config, store)
    }

    pub fn pipeline(&self) -> &Arc<Pipeline> {
        &self.inner.pipeline
    }

    pub fn store(&self) -> &Arc<dyn DocumentStore> {
        &self.inner.store
    }

    async fn worker_permit(&self) -> OwnedSemaphorePermit {
        self.inner
            .workers
            .clone()
            .acquire_owned()
            .await
            .expect("worker semaphore is never closed")
    }

    async fn attach_to_session(&self, session_id: &str, job: Uuid) -> Result<(), StoreError> {
        let _guard = self.inner.sessions.lock().await;
        let store = self.inner.store.as_ref();
        let mut rec: SessionRecord = get_json(store, SESSIONS, session_id)?.unwrap_or(SessionRecord {
            session_id: session_id.to_string(),
            job_ids: Vec::new(),
            created_at: jobs::now_ms(),
        });
        rec.job_ids.push(job);
        put_json(store, SESSIONS, session_id, &rec)
    }

    fn enqueue(&self, job: SynthesisJob) {
        let state = self.clone();
        tokio::spawn(async move { state.run_job(job).await });
    }

    async fn run_job(self, mut job: SynthesisJob) {
        let _permit = self.worker_permit().await;
        let store = self.inner.store.clone();
        if job.transition(JobState::Running).is_err() {
            warn!(id = %job.id, state = ?job.state, "job not runnable");
            return;
        }
        if let Err(e) = put_json(store.as_ref(), JOBS, &job.key(), &job) {
            error!(id = %job.id, error = %e, "cannot mark job running; leaving it queued");
            return;
        }
        let pipeline = self.inner.pipeline.clone();
        let text = job.diacritized.clone();
        let source = job.diacritization_source;
        let voice = job.voice.clone();
        let result = tokio::task::spawn_blocking(move || {
            let diacritized = natiq_core::DiacritizedText::validated(&text, source)
            .map_err(|e| PipelineError::Internal(e.to_string()))?;
            pipeline.synthesize(&diacritized, &voice)
        })
        .await
        .unwrap_or_else(|e| Err(PipelineError::Internal(e.to_string())));

        let outcome = result.and_then(|synth| {
            let key = job.key();
            store
                .put(AUDIO, &key, &synth.waveform.to_wav_bytes())
                .map_err(|e| PipelineError::Unavailable(e.to_string()))?;
            Ok((key, synth))
        });
        match outcome {
            Ok((key, synth)) => {
                let duration = synth.waveform.duration_s();
                job.audio_ref = Some(key);
                job.timings.synth_s = Some(synth.timing_s);
                job.audio_duration_s = Some(duration);
                job.sample_rate = synth.waveform.sample_rate;
                job.rtf = natiq_core::eval::real_time_factor(synth.timing_s, duration).ok();
                let _ = job.transition(JobState::Done);
                info!(id = %job.id, rtf = ?job.rtf, "job done");
            }
            Err(e) => {
                job.error = Some(e.to_string());
                let _ = job.transition(JobState::Failed);
                warn!(id = %job.id, error = %e, "job failed");
            }
        }
        if let Err(e) = put_json(store.as_ref(), JOBS, &job.key(), &job) {
            error!(id = %job.id, error = %e, "cannot record job outcome");
        }
    }

    /// After a restart: requeue queued jobs and fail the ones that were
    /// running when the process stopped.
    pub fn recover(&self) -> Result<usize, StoreError> {
        let store = self.inner.store.as_ref();
        let mut requeued = 0;
        for key in store.keys(JOBS)? {
            let Some(mut job) = get_json::<SynthesisJob>(store, JOBS, &key)? else {
                continue;
            };
            match job.state {
                JobState::Queued => {
                    self.enqueue(job);
                    requeued += 1;
                }
                JobState::Running => {
                    job.error = Some("interrupted by a service restart".into());
                    let _ = job.transition(JobState::Failed);
                    put_json(store, JOBS, &key, &job)?;
                }
                JobState::Done | JobState::Failed => {}
            }
        }
        Ok(requeued)
    }

    pub fn router(&self) -> axum::Router {
        api::router(self.clone())
    }
}

/// A server running on a background task.
pub struct RunningServer {
    pub addr: SocketAddr,
    pub state: AppState,
    pub handle: tokio::task::JoinHandle<std::io::Result<()>>,
}

/// Bind and serve on the current tokio runtime.
pub async fn start(state: AppState, addr: SocketAddr) -> Result<RunningServer, StartError> {
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|source| StartError::Bind { addr, source })?;
    let addr = listener.local_addr().map_err(|source| StartError::Bind { addr, source })?;
    let requeued = state.recover()?;
    if requeued > 0 {
        info!(requeued, "requeued jobs from storage");
    }
    let app = state.router();
    let handle = tokio::spawn(async move { axum::serve(listener, app).await });
    info!(%addr, "listening");
    Ok(RunningServer {
        addr,
        state,
        handle,
    })
}

/// Serve until Ctrl-C.
pub async fn serve(config: ServiceConfig) -> Result<(), StartError> {
    let addr = config.bind;
    let state = AppState::from_config(config)?;
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|source| StartError::Bind { addr, source })?;
    state.recover()?;
    info!(addr = %listener.local_addr().unwrap_or(addr), "listening");
    axum::serve(listener, state.router())
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|source| StartError::Bind { addr, source })
}
