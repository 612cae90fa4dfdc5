//! HTTP bridge between the web studio and the logibench library.
//!
//! Every uploaded instance lives in an in-memory session keyed by a random
//! id. Solves run on the blocking thread pool and can be polled and
//! cancelled; nothing is persisted.

mod api;
mod error;
mod session;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};

use axum::routing::{get, post};
use axum::Router;
use thiserror::Error;
use tower_http::services::ServeDir;
use uuid::Uuid;

pub use api::{CheckRequest, SolveRequest};
pub use error::ApiError;
pub use session::{JobState, Session, SolveStatus, Summary};

/// Response schemas, keyed by name.
pub const SCHEMAS: &[(&str, &str)] = &[
    ("created", include_str!("../schemas/created.json")),
    ("error", include_str!("../schemas/error.json")),
    ("generated", include_str!("../schemas/generated.json")),
    ("instance", include_str!("../schemas/instance.json")),
    ("loaded", include_str!("../schemas/loaded.json")),
    ("plan_loaded", include_str!("../schemas/plan_loaded.json")),
    ("report", include_str!("../schemas/report.json")),
    ("solve_status", include_str!("../schemas/solve_status.json")),
];

#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<RwLock<HashMap<Uuid, Arc<Mutex<Session>>>>>,
}

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("cannot bind {addr}: {source}")]
    Bind { addr: SocketAddr, source: std::io::Error },
    #[error("server error: {0}")]
    Io(#[from] std::io::Error),
}

/// All API routes, plus static files from `static_dir` for any other path.
pub fn router(static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/instances", post(api::create_session))
        .route("/api/sessions/{id}/instance", get(api::get_instance).put(api::put_instance))
        .route("/api/sessions/{id}/generate", post(api::generate_instance))
        .route("/api/sessions/{id}/plan", post(api::load_plan))
        .route("/api/sessions/{id}/check", post(api::check))
        .route("/api/sessions/{id}/solve", post(api::solve))
        .route("/api/sessions/{id}/solve/status", get(api::solve_status))
        .route("/api/sessions/{id}/solve/cancel", post(api::solve_cancel))
        .route("/api/sessions/{id}/export", get(api::export))
        .with_state(AppState::default());
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

pub async fn serve(addr: SocketAddr, static_dir: Option<PathBuf>) -> Result<(), ServeError> {
    let listener = tokio::net::TcpListener::bind(addr).await.map_err(|source| ServeError::Bind { addr, source })?;
    axum::serve(listener, router(static_dir)).await?;
    Ok(())
}
