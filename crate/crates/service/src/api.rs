//! Request handlers.

use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::Json;
use logibench::checker::check_plan;
use logibench::facts_io::{build_instance, build_plan, parse_facts, serialize_instance, serialize_plan};
use logibench::generator::{generate, GenConfig};
use logibench::json::{InstanceDoc, PlanDoc, ReportDoc};
use logibench::model::{Base, DomainVariant};
use logibench::planner::{compute_assignment, solve_min_makespan, Limits, PositionEncoding, SolveResult};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use uuid::Uuid;

use crate::error::ApiError;
use crate::session::{JobState, Session, SolveJob, SolveStatus, Summary};
use crate::AppState;

type Shared = Arc<Mutex<Session>>;

#[derive(Serialize)]
pub struct Created {
    pub session: String,
    pub summary: Summary,
}

#[derive(Serialize)]
pub struct Loaded {
    pub summary: Summary,
    pub dirty: bool,
}

#[derive(Serialize)]
pub struct Generated {
    pub name: String,
    pub seed: u64,
    pub summary: Summary,
}

#[derive(Serialize)]
pub struct PlanLoaded {
    pub horizon: u32,
    pub actions: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CheckRequest {
    pub domain: String,
    pub m_aligned: bool,
    pub trace: bool,
}

impl Default for CheckRequest {
    fn default() -> Self {
        CheckRequest { domain: "A".into(), m_aligned: false, trace: false }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveRequest {
    pub domain: String,
    pub m_aligned: bool,
    /// `none` or `compute`.
    pub assign: String,
    pub positions: PositionEncoding,
    pub max_horizon: u32,
    pub budget_ms: Option<u64>,
    pub node_cap: Option<usize>,
    /// How long the request waits for the result before answering `202`.
    pub wait_ms: u64,
}

impl Default for SolveRequest {
    fn default() -> Self {
        SolveRequest {
            domain: "A".into(),
            m_aligned: false,
            assign: "none".into(),
            positions: PositionEncoding::Paired,
            max_horizon: 100,
            budget_ms: None,
            node_cap: None,
            wait_ms: 2000,
        }
    }
}

#[derive(Deserialize)]
pub struct ExportQuery {
    pub what: String,
}

/// Accepts `A`..`M`, optionally suffixed with `^M`.
fn variant(domain: &str, m_aligned: bool) -> Result<DomainVariant, ApiError> {
    let (base, aligned) = match domain.strip_suffix("^M") {
        Some(b) => (b, true),
        None => (domain, m_aligned),
    };
    let base: Base = base.parse().map_err(ApiError::Unprocessable)?;
    Ok(DomainVariant::new(base, aligned))
}

/// An empty body means all defaults.
fn json_or_default<T: DeserializeOwned + Default>(body: &Bytes) -> Result<T, ApiError> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    serde_json::from_slice(body).map_err(|e| ApiError::BadRequest(e.to_string()))
}

fn session(state: &AppState, id: &str) -> Result<Shared, ApiError> {
    let key = Uuid::parse_str(id).map_err(|_| ApiError::UnknownSession(id.into()))?;
    state.sessions.read().unwrap().get(&key).cloned().ok_or_else(|| ApiError::UnknownSession(id.into()))
}

fn text(body: String) -> Response {
    ([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], body).into_response()
}

pub async fn create_session(State(state): State<AppState>, body: String) -> Result<impl IntoResponse, ApiError> {
    let facts = parse_facts(&body).map_err(|e| ApiError::BadRequest(e.to_string()))?;
    let inst = build_instance(&facts).map_err(|e| ApiError::Unprocessable(e.to_string()))?;
    let summary = Summary::from(&inst);
    let id = Uuid::new_v4();
    let session = Session::new(inst, facts.header_comments);
    state.sessions.write().unwrap().insert(id, Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(Created { session: id.to_string(), summary })))
}

pub async fn get_instance(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<InstanceDoc>, ApiError> {
    let s = session(&state, &id)?;
    let s = s.lock().unwrap();
    Ok(Json(InstanceDoc::from(&s.instance)))
}

pub async fn put_instance(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<Loaded>, ApiError> {
    let s = session(&state, &id)?;
    let doc: InstanceDoc = serde_json::from_slice(&body).map_err(|e| ApiError::BadRequest(e.to_string()))?;
    let inst = doc.to_instance().map_err(|e| ApiError::Unprocessable(e.to_string()))?;
    let mut s = s.lock().unwrap();
    let header = s.header.clone();
    s.replace_instance(inst, header);
    Ok(Json(Loaded { summary: Summary::from(&s.instance), dirty: s.dirty }))
}

pub async fn generate_instance(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<Generated>, ApiError> {
    let s = session(&state, &id)?;
    let cfg: GenConfig = serde_json::from_slice(&body).map_err(|e| ApiError::BadRequest(e.to_string()))?;
    if cfg.template.is_some() {
        return Err(ApiError::Unprocessable("templates are not accepted over HTTP".into()));
    }
    let cfg = GenConfig { count: 1, ..cfg };
    let g = tokio::task::spawn_blocking(move || generate(&cfg))
        .await
        .map_err(|e| ApiError::Unprocessable(e.to_string()))?
        .map_err(|e| ApiError::Unprocessable(e.to_string()))?
        .remove(0);
    let mut s = s.lock().unwrap();
    s.replace_instance(g.instance, g.header);
    Ok(Json(Generated { name: g.name, seed: g.seed, summary: Summary::from(&s.instance) }))
}

pub async fn load_plan(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: String,
) -> Result<Json<PlanLoaded>, ApiError> {
    let s = session(&state, &id)?;
    let facts = parse_facts(&body).map_err(|e| ApiError::BadRequest(e.to_string()))?;
    let mut s = s.lock().unwrap();
    let plan = build_plan(&facts, &s.instance).map_err(|e| ApiError::Unprocessable(e.to_string()))?;
    let loaded = PlanLoaded { horizon: plan.horizon, actions: plan.action_count() };
    s.plan = Some(plan);
    s.dirty = true;
    Ok(Json(loaded))
}

pub async fn check(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<ReportDoc>, ApiError> {
    let s = session(&state, &id)?;
    let req: CheckRequest = json_or_default(&body)?;
    let v = variant(&req.domain, req.m_aligned)?;
    let s = s.lock().unwrap();
    let plan = s.plan.as_ref().ok_or_else(|| ApiError::Conflict("no plan in session".into()))?;
    let report = check_plan(&s.instance, plan, v);
    Ok(Json(ReportDoc::new(&report, req.trace)))
}

fn finish(result: SolveResult, status: &mut SolveStatus, cancelled: bool) {
    match result {
        SolveResult::Plan { plan, makespan } => {
            status.status = JobState::Done;
            status.makespan = Some(makespan);
            status.plan = Some(PlanDoc::from(&plan));
        }
        SolveResult::Unsat { horizon } => {
            status.status = JobState::Unsat;
            status.horizon = Some(horizon);
        }
        SolveResult::Unknown { reason } => {
            status.status = if cancelled { JobState::Cancelled } else { JobState::Unknown };
            status.reason = Some(reason);
        }
    }
}

pub async fn solve(State(state): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    let shared = session(&state, &id)?;
    let req: SolveRequest = json_or_default(&body)?;
    let v = variant(&req.domain, req.m_aligned)?;
    let (inst, revision, job) = {
        let mut s = shared.lock().unwrap();
        if s.job.as_ref().is_some_and(|j| j.snapshot().status == JobState::Running) {
            return Err(ApiError::Conflict("a solve is already running".into()));
        }
        let job = SolveJob::new(v.to_string());
        s.job = Some(job.clone());
        (s.instance.clone(), s.revision, job)
    };
    let assignment = match req.assign.as_str() {
        "none" => None,
        "compute" => Some(compute_assignment(&inst, v, 1000).map_err(|e| ApiError::Unprocessable(e.to_string()))),
        other => Some(Err(ApiError::Unprocessable(format!("unknown assignment mode {other:?}")))),
    };
    let assignment = match assignment.transpose() {
        Ok(a) => a,
        Err(e) => {
            shared.lock().unwrap().job = None;
            return Err(e);
        }
    };
    let mut limits = Limits::default().with_positions(req.positions).with_cancel(job.cancel.clone());
    if let Some(ms) = req.budget_ms {
        limits = limits.with_budget_ms(ms);
    }
    if let Some(cap) = req.node_cap {
        limits.node_cap = cap;
    }
    let worker_job = job.clone();
    let worker_session = shared.clone();
    let max_horizon = req.max_horizon;
    let handle = tokio::task::spawn_blocking(move || {
        let outcome = solve_min_makespan(&inst, v, max_horizon, assignment.as_ref(), &limits);
        let cancelled = worker_job.cancel.load(std::sync::atomic::Ordering::Relaxed);
        let mut status = worker_job.snapshot();
        let plan = match outcome {
            Ok((result, stats)) => {
                let plan = result.plan().cloned();
                finish(result, &mut status, cancelled);
                status.stats = Some(stats);
                plan
            }
            Err(e) => {
                status.status = JobState::Unknown;
                status.reason = Some(e.to_string());
                None
            }
        };
        if let Some(plan) = plan {
            let mut s = worker_session.lock().unwrap();
            if s.revision == revision {
                s.plan = Some(plan);
                s.dirty = true;
            }
        }
        *worker_job.status.lock().unwrap() = status;
    });
    let _ = tokio::time::timeout(Duration::from_millis(req.wait_ms), handle).await;
    let status = job.snapshot();
    let code = if status.status == JobState::Running { StatusCode::ACCEPTED } else { StatusCode::OK };
    Ok((code, Json(status)).into_response())
}

pub async fn solve_status(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<SolveStatus>, ApiError> {
    let s = session(&state, &id)?;
    let s = s.lock().unwrap();
    Ok(Json(s.job.as_ref().map_or_else(SolveStatus::idle, SolveJob::snapshot)))
}

pub async fn solve_cancel(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<SolveStatus>, ApiError> {
    let s = session(&state, &id)?;
    let s = s.lock().unwrap();
    Ok(Json(match &s.job {
        Some(job) => {
            job.request_cancel();
            job.snapshot()
        }
        None => SolveStatus::idle(),
    }))
}

pub async fn export(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<ExportQuery>,
) -> Result<Response, ApiError> {
    let s = session(&state, &id)?;
    let s = s.lock().unwrap();
    match q.what.as_str() {
        "instance" => Ok(text(serialize_instance(&s.instance, &s.header))),
        "plan" => {
            let plan = s.plan.as_ref().ok_or_else(|| ApiError::Conflict("no plan in session".into()))?;
            Ok(text(serialize_plan(plan)))
        }
        other => Err(ApiError::BadRequest(format!("cannot export {other:?}, expected instance or plan"))),
    }
}
