//! Read-only HTTP API over a loaded corpus.
//!
//! | route | body |
//! |---|---|
//! | `GET /api/corpus` | name, profile, records, ingest warnings |
//! | `GET /api/document/{id}` | source text and akṣaras with spans |
//! | `GET /api/matrix` | similarity matrix |
//! | `GET /api/mst` | reuse tree |
//! | `GET /api/compare?a=&b=` | comparison report |
//! | `GET /`, `GET /assets/*` | explorer UI files |
//!
//! The analysis routes take `n` (default 4), `mode`, `k` (default 1, skip
//! mode only), `unit`, `metric` (default `dice`), `combine` (`single` or
//! `mean`) and `normalize` (comma-separated rules or `none`; defaults to the
//! corpus profile). Failures carry `{status, code, message}`.

use std::net::SocketAddr;
use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use aksara_core::similarity::Combine;
use aksara_core::{MetricKind, Mode, NormalizationProfile, ShingleParams, Unit};
use axum::body::Bytes;
use axum::extract::rejection::QueryRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use lru::LruCache;
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;

use crate::corpus::{CorpusIndex, DocumentRecord, IngestWarning};
use crate::error::Error;
use crate::export::ReportDocument;
use crate::query::{self, Query as CorpusQuery};

pub const DEFAULT_CACHE_CAPACITY: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    pub status: u16,
    pub code: String,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            status: status.as_u16(),
            code: code.into(),
            message: message.into(),
        }
    }

    fn bad_request(code: &str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        match &e {
            Error::UnknownDocument(_) => {
                Self::new(StatusCode::NOT_FOUND, "unknown-document", message)
            }
            Error::Params(p) => Self::bad_request(p.code(), message),
            Error::Rule(_) => Self::bad_request("invalid-normalize", message),
            Error::Similarity(s) => Self::bad_request(s.code(), message),
            Error::Graph(_) | Error::EmptyCorpus => Self::bad_request("empty-corpus", message),
            _ => Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

/// Raw query string values; everything is validated by hand so every failure
/// gets an [`ApiError`] code.
#[derive(Debug, Default, Clone, Deserialize)]
pub struct ApiParams {
    pub n: Option<String>,
    pub mode: Option<String>,
    pub k: Option<String>,
    pub unit: Option<String>,
    pub metric: Option<String>,
    pub combine: Option<String>,
    pub normalize: Option<String>,
    pub a: Option<String>,
    pub b: Option<String>,
}

impl ApiParams {
    pub fn shingle_params(&self) -> Result<ShingleParams, ApiError> {
        let number = |value: &Option<String>, default: usize, code: &str| match value {
            None => Ok(default),
            Some(v) => v.parse::<usize>().map_err(|_| {
                ApiError::bad_request(code, format!("`{v}` is not a non-negative integer"))
            }),
        };
        let mode: Mode = match &self.mode {
            None => Mode::Contiguous,
            Some(m) => m.parse().map_err(|e| ApiError::from(Error::Params(e)))?,
        };
        let unit: Unit = match &self.unit {
            None => Unit::Aksara,
            Some(u) => u.parse().map_err(|e| ApiError::from(Error::Params(e)))?,
        };
        let n = number(&self.n, 4, "invalid-n")?;
        let k = number(&self.k, 1, "invalid-k")?;
        ShingleParams::new(n, mode, k, unit).map_err(|e| Error::Params(e).into())
    }

    pub fn profile(
        &self,
        default: &NormalizationProfile,
    ) -> Result<NormalizationProfile, ApiError> {
        match &self.normalize {
            None => Ok(default.clone()),
            Some(rules) => rules.parse().map_err(|e| Error::Rule(e).into()),
        }
    }

    pub fn query(&self, default_profile: &NormalizationProfile) -> Result<CorpusQuery, ApiError> {
        let metric: MetricKind = match &self.metric {
            None => MetricKind::Dice,
            Some(m) => m.parse().map_err(Error::Similarity)?,
        };
        let combine = match self.combine.as_deref() {
            None | Some("single") => Combine::Single,
            Some("mean") => Combine::Mean,
            Some(other) => {
                return Err(ApiError::bad_request(
                    "invalid-combine",
                    format!("unknown combine `{other}`; expected single or mean"),
                ))
            }
        };
        Ok(
            CorpusQuery::new(self.shingle_params()?, self.profile(default_profile)?)
                .metric(metric)
                .combine(combine),
        )
    }

    fn document(&self, which: &str) -> Result<&str, ApiError> {
        let value = if which == "a" { &self.a } else { &self.b };
        value.as_deref().ok_or_else(|| {
            ApiError::bad_request("missing-parameter", format!("`{which}` is required"))
        })
    }
}

#[derive(Serialize)]
pub struct CorpusSummary<'a> {
    pub name: &'a str,
    pub profile: &'a NormalizationProfile,
    pub documents: Vec<&'a DocumentRecord>,
    pub warnings: &'a [IngestWarning],
}

impl<'a> CorpusSummary<'a> {
    pub fn new(index: &'a CorpusIndex) -> Self {
        CorpusSummary {
            name: &index.name,
            profile: &index.profile,
            documents: index.documents().iter().map(|d| &d.record).collect(),
            warnings: index.warnings(),
        }
    }
}

struct AppState {
    index: Arc<CorpusIndex>,
    assets: Option<PathBuf>,
    cache: Mutex<LruCache<String, Bytes>>,
}

type Shared = Arc<AppState>;

impl AppState {
    /// Serves `key` from the cache, computing it on a blocking thread if
    /// absent. The lock is never held while computing.
    async fn cached<F>(&self, key: String, compute: F) -> Result<Bytes, ApiError>
    where
        F: FnOnce(&CorpusIndex) -> Result<Vec<u8>, ApiError> + Send + 'static,
    {
        if let Some(hit) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        let index = Arc::clone(&self.index);
        let body = tokio::task::spawn_blocking(move || compute(&index))
            .await
            .map_err(|e| {
                ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string())
            })??;
        let body = Bytes::from(body);
        self.cache
            .lock()
            .expect("cache lock")
            .put(key, body.clone());
        Ok(body)
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>, ApiError> {
    serde_json::to_vec(value).map_err(|e| Error::Json(e).into())
}

fn json_response(body: Bytes) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], body).into_response()
}

type Params = Result<Query<ApiParams>, QueryRejection>;

fn params(p: Params) -> Result<ApiParams, ApiError> {
    p.map(|Query(p)| p)
        .map_err(|e| ApiError::bad_request("invalid-params", e.body_text()))
}

async fn corpus(State(state): State<Shared>) -> Result<Response, ApiError> {
    let body = state
        .cached("corpus".into(), |index| to_json(&CorpusSummary::new(index)))
        .await?;
    Ok(json_response(body))
}

async fn document(
    State(state): State<Shared>,
    Path(id): Path<String>,
    p: Params,
) -> Result<Response, ApiError> {
    let profile = params(p)?.profile(&state.index.profile)?;
    let key = format!("document|{id}|{profile}");
    let body = state
        .cached(key, move |index| {
            to_json(&query::document_view(index, &id, &profile)?)
        })
        .await?;
    Ok(json_response(body))
}

fn bundle_key(route: &str, q: &CorpusQuery) -> String {
    format!(
        "{route}|{}|{}|{}|{:?}",
        q.params, q.profile, q.metric, q.combine
    )
}

async fn matrix(State(state): State<Shared>, p: Params) -> Result<Response, ApiError> {
    let q = params(p)?.query(&state.index.profile)?;
    let body = state
        .cached(bundle_key("matrix", &q), move |index| {
            to_json(&query::matrix(index, &q)?)
        })
        .await?;
    Ok(json_response(body))
}

async fn mst(State(state): State<Shared>, p: Params) -> Result<Response, ApiError> {
    let q = params(p)?.query(&state.index.profile)?;
    let body = state
        .cached(bundle_key("mst", &q), move |index| {
            to_json(&query::tree(index, &q)?)
        })
        .await?;
    Ok(json_response(body))
}

async fn compare(State(state): State<Shared>, p: Params) -> Result<Response, ApiError> {
    let p = params(p)?;
    let params = p.shingle_params()?;
    let profile = p.profile(&state.index.profile)?;
    let (a, b) = (p.document("a")?.to_string(), p.document("b")?.to_string());
    let key = format!("compare|{params}|{profile}|{a}|{b}");
    let body = state
        .cached(key, move |index| {
            let report = query::comparison(index, &a, &b, &params, &profile)?;
            to_json(&ReportDocument::new(&report))
        })
        .await?;
    Ok(json_response(body))
}

const PLACEHOLDER: &str = "<!DOCTYPE html>
<html>
<head><meta charset=\"utf-8\"><title>aksara</title></head>
<body>
<h1>aksara</h1>
<p>No explorer assets were configured. The API is available at
<a href=\"/api/corpus\">/api/corpus</a>, <code>/api/document/{id}</code>,
<code>/api/matrix</code>, <code>/api/mst</code> and <code>/api/compare</code>.</p>
</body>
</html>
";

async fn root(State(state): State<Shared>) -> Response {
    if let Some(dir) = &state.assets {
        if let Ok(page) = tokio::fs::read_to_string(dir.join("index.html")).await {
            return Html(page).into_response();
        }
    }
    Html(PLACEHOLDER).into_response()
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not-found", "no such route")
}

/// Routes over `index`. `assets` is the built explorer UI, if any.
pub fn router(index: Arc<CorpusIndex>, assets: Option<PathBuf>, cache_capacity: usize) -> Router {
    let capacity = NonZeroUsize::new(cache_capacity).unwrap_or(NonZeroUsize::MIN);
    let state = Arc::new(AppState {
        index,
        assets: assets.clone(),
        cache: Mutex::new(LruCache::new(capacity)),
    });
    let mut app = Router::new()
        .route("/", get(root))
        .route("/api/corpus", get(corpus))
        .route("/api/document/{id}", get(document))
        .route("/api/matrix", get(matrix))
        .route("/api/mst", get(mst))
        .route("/api/compare", get(compare));
    if let Some(dir) = assets {
        app = app.nest_service("/assets", ServeDir::new(dir));
    }
    app.fallback(not_found).with_state(state)
}

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub addr: SocketAddr,
    pub assets: Option<PathBuf>,
    pub cache_capacity: usize,
}

pub async fn serve(index: Arc<CorpusIndex>, config: ServerConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(config.addr).await?;
    axum::serve(
        listener,
        router(index, config.assets, config.cache_capacity),
    )
    .await
}
