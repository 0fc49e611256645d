use std::collections::HashMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use natiq_core::diacritizer::DiacritizeResponse;
use natiq_core::synth::{SynthesizeWire, VoiceSpec};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tracing::{error, warn};
use uuid::Uuid;

use crate::jobs::{now_ms, JobState, SessionRecord, SynthesisJob, Timings};
use crate::pipeline::PipelineError;
use crate::store::{get_json, put_json, StoreError, AUDIO, JOBS, SESSIONS};
use crate::AppState;

pub const SESSION_COOKIE: &str = "natiq_session";

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
        }
    }

    fn not_found(what: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, format!("{what} not found"))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

impl From<PipelineError> for ApiError {
    fn from(e: PipelineError) -> Self {
        let status = match e {
            PipelineError::BadInput(_) => StatusCode::BAD_REQUEST,
            PipelineError::Unavailable(_) => StatusCode::SERVICE_UNAVAILABLE,
            PipelineError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, e.to_string())
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        error!(error = %e, "storage failure");
        ApiError::new(StatusCode::SERVICE_UNAVAILABLE, e.to_string())
    }
}

type ApiResult<T> = Result<T, ApiError>;

pub fn router(state: AppState) -> Router {
    let mut app = Router::new()
        .route("/api/synthesize", post(create_job))
        .route("/api/jobs/{id}", get(get_job))
        .route("/api/audio/{id}", get(get_audio))
        .route("/api/normalize", get(preview))
        .route("/api/voices", get(voices))
        .route("/api/session", get(session))
        .route("/api/health", get(health))
        .route("/synthesize", post(backend_synthesize))
        .route("/diacritize", post(backend_diacritize));
    app = match &state.inner.config.static_dir {
        Some(dir) => app.fallback_service(tower_http::services::ServeDir::new(dir)),
        None => app.fallback(|| async { ApiError::not_found("route") }),
    };
    app.with_state(state)
}

fn parse_json<T: for<'de> Deserialize<'de>>(body: &[u8]) -> ApiResult<T> {
    serde_json::from_slice(body)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, format!("invalid JSON body: {e}")))
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))
}

fn cookie_session(headers: &HeaderMap) -> Option<String> {
    headers
        .get_all(header::COOKIE)
        .iter()
        .filter_map(|v| v.to_str().ok())
        .flat_map(|v| v.split(';'))
        .filter_map(|kv| kv.trim().split_once('='))
        .find(|(k, _)| *k == SESSION_COOKIE)
        .map(|(_, v)| v.to_string())
        .filter(|v| Uuid::parse_str(v).is_ok())
}

fn set_cookie(session_id: &str) -> (header::HeaderName, HeaderValue) {
    let v = format!("{SESSION_COOKIE}={session_id}; Path=/; HttpOnly; SameSite=Lax");
    (
        header::SET_COOKIE,
        HeaderValue::from_str(&v).expect("uuid cookie is ASCII"),
    )
}

#[derive(Debug, Deserialize)]
struct CreateJob {
    text: String,
    voice: String,
}

#[derive(Debug, Serialize)]
struct Created {
    job_id: Uuid,
    state: JobState,
    session_id: String,
}

async fn create_job(
    State(state): State<AppState>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<Response> {
    let req: CreateJob = parse_json(&body)?;
    let pipeline = state.inner.pipeline.clone();
    pipeline.voice(&req.voice)?;
    pipeline.check_text(&req.text)?;
    let text = req.text.clone();
    let preview = blocking(move || pipeline.preview(&text)).await??;

    let session_id = cookie_session(&headers).unwrap_or_else(|| Uuid::new_v4().to_string());
    let job = SynthesisJob {
        id: Uuid::new_v4(),
        session_id: session_id.clone(),
        input_text: req.text,
        voice: req.voice,
        state: JobState::Queued,
        created_at: now_ms(),
        normalized: preview.normalized.text.clone(),
        diacritized: preview.diacritized.content.clone(),
        diacritization_source: preview.diacritized.source,
        audio_ref: None,
        timings: Timings {
            normalize_s: preview.normalize_s,
            diacritize_s: preview.diacritize_s,
            synth_s: None,
        },
        audio_duration_s: None,
        sample_rate: state.inner.pipeline.output_rate,
        rtf: None,
        error: None,
    };
    put_json(state.inner.store.as_ref(), JOBS, &job.key(), &job)?;
    state.attach_to_session(&session_id, job.id).await?;
    let created = Created {
        job_id: job.id,
        state: job.state,
        session_id: session_id.clone(),
    };
    state.enqueue(job);
    Ok((StatusCode::ACCEPTED, [set_cookie(&session_id)], Json(created)).into_response())
}

fn load_job(state: &AppState, id: &str) -> ApiResult<SynthesisJob> {
    let id = Uuid::parse_str(id).map_err(|_| ApiError::not_found("job"))?;
    get_json(state.inner.store.as_ref(), JOBS, &id.to_string())?
        .ok_or_else(|| ApiError::not_found("job"))
}

async fn get_job(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<SynthesisJob>> {
    Ok(Json(load_job(&state, &id)?))
}

async fn get_audio(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let job = load_job(&state, &id)?;
    let key = match (&job.state, &job.audio_ref) {
        (JobState::Done, Some(key)) => key.clone(),
        (s, _) => {
            return Err(ApiError::new(
                StatusCode::CONFLICT,
                format!("job is {}", serde_json::to_value(s).unwrap().as_str().unwrap_or("?")),
            ))
        }
    };
    let bytes = state
        .inner
        .store
        .get(AUDIO, &key)?
        .ok_or_else(|| ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "audio missing from storage"))?;
    let disposition = format!("attachment; filename=\"{}.wav\"", job.id);
    Ok((
        [
            (header::CONTENT_TYPE, HeaderValue::from_static("audio/wav")),
            (
                header::CONTENT_DISPOSITION,
                HeaderValue::from_str(&disposition).expect("ASCII"),
            ),
        ],
        bytes,
    )
        .into_response())
}

async fn preview(
    State(state): State<AppState>,
    Query(q): Query<HashMap<String, String>>,
) -> ApiResult<Json<serde_json::Value>> {
    let text = q.get("text").cloned().unwrap_or_default();
    let pipeline = state.inner.pipeline.clone();
    let p = blocking(move || pipeline.preview(&text)).await??;
    Ok(Json(json!({
        "normalized": p.normalized.text,
        "diacritized": p.diacritized.content,
        "diacritization_source": p.diacritized.source,
        "words": p.normalized.words,
        "trace": p.normalized.trace,
        "timings": { "normalize_s": p.normalize_s, "diacritize_s": p.diacritize_s },
    })))
}

async fn voices(State(state): State<AppState>) -> Json<Vec<VoiceSpec>> {
    Json(state.inner.pipeline.voices.values().cloned().collect())
}

async fn session(State(state): State<AppState>, headers: HeaderMap) -> ApiResult<Response> {
    let (session_id, record) = match cookie_session(&headers) {
        Some(sid) => {
            let rec: Option<SessionRecord> = get_json(state.inner.store.as_ref(), SESSIONS, &sid)?;
            (sid, rec)
        }
        None => (Uuid::new_v4().to_string(), None),
    };
    let mut jobs = Vec::new();
    if let Some(rec) = &record {
        for id in &rec.job_ids {
            match get_json::<SynthesisJob>(state.inner.store.as_ref(), JOBS, &id.to_string())? {
                Some(job) => jobs.push(job),
                None => warn!(%id, "session references a missing job"),
            }
        }
    }
    let body = json!({
        "session_id": session_id,
        "created_at": record.as_ref().map(|r| r.created_at),
        "jobs": jobs,
    });
    Ok(([set_cookie(&session_id)], Json(body)).into_response())
}

async fn health() -> Json<serde_json::Value> {
    Json(json!({ "status": "ok" }))
}

/// Backend protocol: `{text, voice, rate}` → WAV bytes.
async fn backend_synthesize(State(state): State<AppState>, body: Bytes) -> ApiResult<Response> {
    let wire: SynthesizeWire = parse_json(&body)?;
    let pipeline = state.inner.pipeline.clone();
    let voices = pipeline.voices.clone();
    let req = wire
        .into_request(|name| voices.get(name).cloned().or_else(|| VoiceSpec::builtin(name)))
        .map_err(PipelineError::from)?;
    let _permit = state.worker_permit().await;
    let out = blocking(move || pipeline.synthesizer.synthesize(&req)).await?;
    let out = out.map_err(PipelineError::from)?;
    Ok((
        [(header::CONTENT_TYPE, HeaderValue::from_static("audio/wav"))],
        out.waveform.to_wav_bytes(),
    )
        .into_response())
}

/// Backend protocol: `{text}` → `{diacritized}`.
async fn backend_diacritize(
    State(state): State<AppState>,
    body: Bytes,
) -> ApiResult<Json<DiacritizeResponse>> {
    #[derive(Deserialize)]
    struct Req {
        text: String,
    }
    let req: Req = parse_json(&body)?;
    let pipeline: Arc<_> = state.inner.pipeline.clone();
    let out = blocking(move || pipeline.diacritize(&req.text)).await??;
    Ok(Json(DiacritizeResponse {
        diacritized: out.content,
    }))
}
