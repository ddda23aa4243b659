//! HTTP front end for one model and its adoption state.
//!
//! Reads work on a snapshot of `(model, adoption, revision)`; writes are
//! applied one at a time under a write lock, which tokio grants in arrival
//! order.
//!
//! Routes:
//!
//! | method | path                    | body / query                           |
//! |--------|-------------------------|----------------------------------------|
//! | GET    | `/api/model`            | honours `If-None-Match`                |
//! | GET    | `/api/assessment`       |                                        |
//! | GET    | `/api/layers`           |                                        |
//! | GET    | `/api/plan`             | `?target=<id or path>&mode=partial\|full` |
//! | POST   | `/api/whatif`           | `{"overlay": {"<id>": "<status>"}}`    |
//! | PUT    | `/api/adoption/{id}`    | `{"status": "<status>"}`, optional `If-Match` |

mod error;

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::Router;
use serde::Deserialize;
use tokio::sync::RwLock;
use tower_http::cors::CorsLayer;
use vaspi::assessment::{assess, plan, AdoptionState, AdoptionStatus, PlanMode, PlanTarget};
use vaspi::graph::layering;
use vaspi::io::{export_report, json_document, serialize_model, PlanDocument, ReportFormat};
use vaspi::{AssessmentConfig, BdnModel};

pub use error::ApiError;

pub const DEFAULT_PORT: u16 = 8642;

const INDEX_HTML: &str = include_str!("../static/index.html");

#[derive(Debug, Clone, Default)]
pub struct ServiceOptions {
    /// Where to write the adoption state after every change.
    pub adoption_path: Option<PathBuf>,
    /// Allow cross-origin requests.
    pub cors: bool,
}

#[derive(Debug, Clone)]
pub struct Session {
    pub adoption: AdoptionState,
    pub revision: u64,
}

pub struct AppState {
    model: BdnModel,
    model_text: String,
    session: RwLock<Session>,
    options: ServiceOptions,
}

impl AppState {
    pub fn new(model: BdnModel, adoption: Option<AdoptionState>, options: ServiceOptions) -> vaspi::Result<Self> {
        let adoption = adoption.unwrap_or_else(|| AdoptionState::new(model.context.clone()));
        adoption.check_against(&model)?;
        Ok(AppState {
            model_text: serialize_model(&model),
            model,
            session: RwLock::new(Session { adoption, revision: 0 }),
            options,
        })
    }

    pub fn model(&self) -> &BdnModel {
        &self.model
    }

    pub async fn snapshot(&self) -> Session {
        self.session.read().await.clone()
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    let cors = state.options.cors;
    let router = Router::new()
        .route("/", get(index))
        .route("/api/model", get(get_model))
        .route("/api/assessment", get(get_assessment))
        .route("/api/layers", get(get_layers))
        .route("/api/plan", get(get_plan))
        .route("/api/whatif", post(post_whatif))
        .route("/api/adoption/{id}", put(put_adoption))
        .with_state(state);
    if cors {
        router.layer(CorsLayer::permissive())
    } else {
        router
    }
}

/// Binds and serves until the process is stopped.
pub async fn serve(state: AppState, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(Arc::new(state))).await
}

fn etag(revision: u64) -> String {
    format!("\"{revision}\"")
}

fn json_response(body: String, revision: u64) -> Response {
    (
        [
            (header::CONTENT_TYPE, HeaderValue::from_static("application/json")),
            (header::ETAG, HeaderValue::from_str(&etag(revision)).expect("ascii")),
        ],
        body,
    )
        .into_response()
}

async fn index() -> Html<&'static str> {
    Html(INDEX_HTML)
}

async fn get_model(State(state): State<Arc<AppState>>, headers: HeaderMap) -> Response {
    let revision = state.session.read().await.revision;
    let current = etag(revision);
    let fresh = headers
        .get(header::IF_NONE_MATCH)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.split(',').any(|t| t.trim() == current || t.trim() == "*"));
    if fresh {
        return (StatusCode::NOT_MODIFIED, [(header::ETAG, HeaderValue::from_str(&current).expect("ascii"))])
            .into_response();
    }
    json_response(state.model_text.clone(), revision)
}

async fn get_assessment(State(state): State<Arc<AppState>>) -> Result<Response, ApiError> {
    let session = state.snapshot().await;
    let report = assess(&state.model, &session.adoption, &AssessmentConfig::default())?;
    Ok(json_response(export_report(&report, ReportFormat::Json), session.revision))
}

async fn get_layers(State(state): State<Arc<AppState>>) -> Response {
    let revision = state.session.read().await.revision;
    let body = BTreeMap::from([("layers", layering(&state.model))]);
    json_response(json_document(&body), revision)
}

#[derive(Debug, Deserialize)]
struct PlanQuery {
    target: Option<String>,
    mode: Option<String>,
}

async fn get_plan(State(state): State<Arc<AppState>>, Query(query): Query<PlanQuery>) -> Result<Response, ApiError> {
    let target = query.target.ok_or_else(|| ApiError::bad_request("missing query parameter 'target'"))?;
    let mode = match query.mode.as_deref() {
        None | Some("partial") => PlanMode::Partial,
        Some("full") => PlanMode::Full,
        Some(other) => return Err(ApiError::bad_request(format!("mode must be partial or full, got {other:?}"))),
    };
    let session = state.snapshot().await;
    let resolved = PlanTarget::resolve(&state.model, &target)?;
    let config = AssessmentConfig { plan_target_mode: mode, ..AssessmentConfig::default() };
    let steps = plan(&state.model, &session.adoption, &resolved, &config)?;
    let doc = PlanDocument { target: resolved.label(), mode, steps };
    Ok(json_response(json_document(&doc), session.revision))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WhatIf {
    #[serde(default)]
    overlay: BTreeMap<String, String>,
}

fn parse_status(text: &str) -> Result<AdoptionStatus, ApiError> {
    text.parse().map_err(|_| {
        ApiError::unprocessable(format!("status must be not_adopted, in_progress or adopted, got {text:?}"))
    })
}

async fn post_whatif(State(state): State<Arc<AppState>>, body: String) -> Result<Response, ApiError> {
    let request: WhatIf = serde_json::from_str(&body).map_err(|e| ApiError::bad_request(e.to_string()))?;
    let session = state.snapshot().await;
    let mut overlay = session.adoption.clone();
    for (id, status) in &request.overlay {
        if !state.model.practices.contains_key(id) {
            return Err(vaspi::Error::UnknownPractice(id.clone()).into());
        }
        overlay.set(id.clone(), parse_status(status)?);
    }
    let report = assess(&state.model, &overlay, &AssessmentConfig::default())?;
    Ok(json_response(export_report(&report, ReportFormat::Json), session.revision))
}

#[derive(Debug, Deserialize)]
struct StatusBody {
    status: serde_json::Value,
}

async fn put_adoption(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: String,
) -> Result<Response, ApiError> {
    let request: StatusBody = serde_json::from_str(&body).map_err(|e| ApiError::bad_request(e.to_string()))?;
    let status = match &request.status {
        serde_json::Value::String(s) => parse_status(s)?,
        other => return Err(ApiError::unprocessable(format!("status must be a string, got {other}"))),
    };
    if !state.model.practices.contains_key(&id) {
        return Err(vaspi::Error::UnknownPractice(id).into());
    }

    let mut session = state.session.write().await;
    if let Some(expected) = headers.get(header::IF_MATCH).and_then(|v| v.to_str().ok()) {
        let current = etag(session.revision);
        if expected.trim() != "*" && !expected.split(',').any(|t| t.trim() == current) {
            return Err(ApiError::precondition_failed(format!("current revision is {current}")));
        }
    }
    let mut next = session.adoption.with(&id, status);
    next.timestamp = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
    if let Some(path) = &state.options.adoption_path {
        let tmp = path.with_extension("tmp");
        tokio::fs::write(&tmp, next.to_json()).await.map_err(ApiError::io)?;
        tokio::fs::rename(&tmp, path).await.map_err(ApiError::io)?;
    }
    session.adoption = next;
    session.revision += 1;
    let revision = session.revision;
    drop(session);

    let body = json_document(&serde_json::json!({ "practice": id, "status": status, "revision": revision }));
    Ok(json_response(body, revision))
}
