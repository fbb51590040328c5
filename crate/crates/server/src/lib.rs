//! HTTP/JSON service for fuzzing runs.
//!
//! `POST /api/runs` fuzzes a contract and stores the canonical result
//! document under its content-derived run id. Documents are immutable, so
//! resubmitting identical inputs is a cache hit. With a results directory
//! configured each document is also written to `<dir>/<run_id>.json` and
//! survives restarts.

use std::collections::HashMap;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path as UrlPath, State};
use axum::http::{header, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use minisim_core::api::{ErrorBody, RunCreated, RunRequest, MAX_SOURCE_BYTES};
use minisim_core::document::{self, canonical_bytes, run_id};
use tokio::net::TcpListener;
use tower_http::services::ServeDir;
use tower_http::trace::TraceLayer;

#[derive(Debug, Clone, Default)]
pub struct ServerConfig {
    /// Where result documents are persisted. In-memory only when unset.
    pub results_dir: Option<PathBuf>,
    /// Built UI bundle served at `/`. A placeholder page is served when unset.
    pub ui_dir: Option<PathBuf>,
}

#[derive(Default)]
struct Store {
    results_dir: Option<PathBuf>,
    documents: RwLock<HashMap<String, Bytes>>,
}

impl Store {
    async fn get(&self, id: &str) -> Option<Bytes> {
        if !is_run_id(id) {
            return None;
        }
        if let Some(doc) = self.documents.read().unwrap().get(id) {
            return Some(doc.clone());
        }
        let path = self.results_dir.as_ref()?.join(format!("{id}.json"));
        let bytes = Bytes::from(tokio::fs::read(path).await.ok()?);
        self.documents
            .write()
            .unwrap()
            .insert(id.to_owned(), bytes.clone());
        Some(bytes)
    }

    async fn put(&self, id: &str, bytes: Bytes) -> io::Result<()> {
        if let Some(dir) = &self.results_dir {
            write_atomic(dir, id, &bytes).await?;
        }
        self.documents.write().unwrap().insert(id.to_owned(), bytes);
        Ok(())
    }
}

/// Writes through a temporary file so readers never see a partial document.
async fn write_atomic(dir: &Path, id: &str, bytes: &[u8]) -> io::Result<()> {
    tokio::fs::create_dir_all(dir).await?;
    let tmp = dir.join(format!(".{id}.{}.tmp", std::process::id()));
    tokio::fs::write(&tmp, bytes).await?;
    tokio::fs::rename(&tmp, dir.join(format!("{id}.json"))).await
}

fn is_run_id(id: &str) -> bool {
    id.len() == 32
        && id
            .bytes()
            .all(|b| b.is_ascii_hexdigit() && !b.is_ascii_uppercase())
}

struct ApiError(StatusCode, ErrorBody);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(self.1)).into_response()
    }
}

fn not_found(what: &str) -> ApiError {
    ApiError(StatusCode::NOT_FOUND, ErrorBody::new("not_found", what))
}

fn json_bytes(bytes: Bytes) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], bytes).into_response()
}

async fn create_run(
    State(store): State<Arc<Store>>,
    body: Bytes,
) -> Result<Json<RunCreated>, ApiError> {
    let req: RunRequest = serde_json::from_slice(&body).map_err(|e| {
        ApiError(
            StatusCode::BAD_REQUEST,
            ErrorBody::new("request", e.to_string()),
        )
    })?;
    if req.source.len() > MAX_SOURCE_BYTES {
        return Err(ApiError(
            StatusCode::PAYLOAD_TOO_LARGE,
            ErrorBody::new(
                "too_large",
                format!(
                    "source is {} bytes; the limit is {MAX_SOURCE_BYTES}",
                    req.source.len()
                ),
            ),
        ));
    }
    let id = run_id(&req.source, &req.config);
    if store.get(&id).await.is_some() {
        tracing::debug!(run_id = %id, "cache hit");
        return Ok(Json(RunCreated { run_id: id }));
    }

    let doc = tokio::task::spawn_blocking(move || document::fuzz_source(&req.source, &req.config))
        .await
        .map_err(|e| {
            ApiError(
                StatusCode::INTERNAL_SERVER_ERROR,
                ErrorBody::new("internal", e.to_string()),
            )
        })?
        .map_err(|e| ApiError(StatusCode::BAD_REQUEST, ErrorBody::from(&e)))?;
    store
        .put(&id, Bytes::from(document::export(&doc)))
        .await
        .map_err(|e| {
            ApiError(
                StatusCode::INTERNAL_SERVER_ERROR,
                ErrorBody::new("io", e.to_string()),
            )
        })?;
    tracing::info!(run_id = %id, simulations = doc.simulations.len(), "run stored");
    Ok(Json(RunCreated { run_id: id }))
}

async fn get_run(
    State(store): State<Arc<Store>>,
    UrlPath(id): UrlPath<String>,
) -> Result<Response, ApiError> {
    let bytes = store
        .get(&id)
        .await
        .ok_or_else(|| not_found("unknown run id"))?;
    Ok(json_bytes(bytes))
}

async fn get_simulation(
    State(store): State<Arc<Store>>,
    UrlPath((id, k)): UrlPath<(String, usize)>,
) -> Result<Response, ApiError> {
    let bytes = store
        .get(&id)
        .await
        .ok_or_else(|| not_found("unknown run id"))?;
    let doc = document::parse_document(&bytes).map_err(|e| {
        ApiError(
            StatusCode::INTERNAL_SERVER_ERROR,
            ErrorBody::new("corrupt", e.to_string()),
        )
    })?;
    let sim = doc
        .simulations
        .get(k)
        .ok_or_else(|| not_found("simulation index out of range"))?;
    Ok(json_bytes(Bytes::from(canonical_bytes(sim))))
}

async fn healthz() -> &'static str {
    "ok"
}

async fn placeholder() -> Html<&'static str> {
    Html(include_str!("placeholder.html"))
}

pub fn router(config: &ServerConfig) -> Router {
    let store = Arc::new(Store {
        results_dir: config.results_dir.clone(),
        ..Store::default()
    });
    let api = Router::new()
        .route("/healthz", get(healthz))
        .route("/api/runs", post(create_run))
        .route("/api/runs/{id}", get(get_run))
        .route("/api/runs/{id}/simulations/{k}", get(get_simulation))
        // room for the largest source plus its JSON escaping
        .layer(DefaultBodyLimit::max(4 * MAX_SOURCE_BYTES))
        .with_state(store);
    let app = match &config.ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(placeholder)),
    };
    app.layer(TraceLayer::new_for_http())
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    listener: TcpListener,
    config: ServerConfig,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> io::Result<()> {
    axum::serve(listener, router(&config))
        .with_graceful_shutdown(shutdown)
        .await
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_ids_are_lower_hex() {
        assert!(is_run_id("0123456789abcdef0123456789abcdef"));
        assert!(!is_run_id("0123456789ABCDEF0123456789abcdef"));
        assert!(!is_run_id("../../etc/passwd"));
        assert!(!is_run_id(""));
    }
}
