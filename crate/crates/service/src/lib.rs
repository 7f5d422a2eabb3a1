//! HTTP API over an in-memory store of portfolio problems.
//!
//! | route | body | response |
//! |---|---|---|
//! | `GET /api/health` | | `{"status": "ok"}` |
//! | `POST /api/problems` | `{"history": csv text, "config": {..}}` | `{"id", "summary"}` |
//! | `GET /api/problems/{id}` | | `{"id", "summary"}` |
//! | `POST /api/problems/{id}/solve` | `{"alpha", "lambda", "risk_tolerance"?}` | solution document |
//! | `POST /api/problems/{id}/sweep` | `{"alphas"?, "lambdas"?, "risk_tolerance"?}` | sweep table |
//!
//! Errors come back as `{"error": kind, "message": ..}` plus `field`,
//! `line`/`column` or `reason` where they apply.

use std::collections::HashMap;
use std::future::Future;
use std::sync::{Arc, RwLock};
use std::time::SystemTime;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use satport::io::{
    config::config_from_value, parse_history_str, IoError, SolutionDocument, UniverseSummary,
};
use satport::model::{solve_portfolio, ModelError};
use satport::sweep::{default_alphas, default_lambdas, sweep, SweepError};
use satport::{Interval, PortfolioProblem};
use serde::Serialize;
use serde_json::{json, Map, Value};
use tokio::net::TcpListener;
use tower_http::cors::{AllowOrigin, CorsLayer};

/// Environment variable holding the default port of `satport serve`.
pub const PORT_ENV: &str = "SATPORT_PORT";
pub const DEFAULT_PORT: u16 = 8080;

/// A stored problem. Immutable once created.
#[derive(Debug)]
pub struct SessionProblem {
    pub id: String,
    pub problem: PortfolioProblem,
    pub summary: UniverseSummary,
    pub created_at: SystemTime,
}

#[derive(Debug, Clone, Default)]
pub struct AppState {
    problems: Arc<RwLock<HashMap<String, Arc<SessionProblem>>>>,
}

impl AppState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, id: &str) -> Option<Arc<SessionProblem>> {
        self.problems.read().expect("store lock").get(id).cloned()
    }

    pub fn len(&self) -> usize {
        self.problems.read().expect("store lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn insert(&self, session: SessionProblem) -> Arc<SessionProblem> {
        let session = Arc::new(session);
        self.problems
            .write()
            .expect("store lock")
            .insert(session.id.clone(), session.clone());
        session
    }
}

/// Which browser origins may call the API.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum CorsPolicy {
    #[default]
    Any,
    Origins(Vec<String>),
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, kind: &str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            body: json!({ "error": kind, "message": message.into() }),
        }
    }

    fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.body[key] = serde_json::to_value(value).expect("serializable detail");
        self
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    fn field(field: &str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "invalid_field", message).with("field", field)
    }

    fn not_found(id: &str) -> Self {
        Self::new(
            StatusCode::NOT_FOUND,
            "not_found",
            format!("no problem with id {id}"),
        )
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<IoError> for ApiError {
    fn from(e: IoError) -> Self {
        match &e {
            IoError::Schema { field, .. } => {
                ApiError::field(&format!("config.{field}"), e.to_string())
            }
            IoError::Parse { line, column, .. } | IoError::NonFiniteValue { line, column } => {
                ApiError::field("history", e.to_string())
                    .with("line", line)
                    .with("column", column)
            }
            IoError::Estimation(_) => ApiError::field("history", e.to_string()),
            IoError::Model(m) => m.clone().into(),
            IoError::Read { .. } => ApiError::bad_request(e.to_string()),
        }
    }
}

impl From<ModelError> for ApiError {
    fn from(e: ModelError) -> Self {
        match &e {
            ModelError::Infeasible(reason) => ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "infeasible",
                e.to_string(),
            )
            .with("reason", reason),
            ModelError::BadParameter { name, .. } => ApiError::field(name, e.to_string()),
            ModelError::InvalidProblem { field, .. } => ApiError::field(field, e.to_string()),
            ModelError::Unbounded | ModelError::Solver(_) => {
                ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "solver", e.to_string())
            }
        }
    }
}

impl From<SweepError> for ApiError {
    fn from(e: SweepError) -> Self {
        ApiError::bad_request(e.to_string())
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn json_object(body: &Bytes) -> ApiResult<Map<String, Value>> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Err(ApiError::bad_request("empty body"));
    }
    match serde_json::from_slice::<Value>(body) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(ApiError::bad_request("body must be a JSON object")),
        Err(e) => Err(ApiError::bad_request(format!("malformed JSON: {e}"))),
    }
}

fn reject_unknown(obj: &Map<String, Value>, allowed: &[&str]) -> ApiResult<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(ApiError::field(k, "unknown field")),
        None => Ok(()),
    }
}

fn number(obj: &Map<String, Value>, field: &str) -> ApiResult<f64> {
    match obj.get(field) {
        Some(v) => v
            .as_f64()
            .ok_or_else(|| ApiError::field(field, "must be a number")),
        None => Err(ApiError::field(field, "missing required field")),
    }
}

fn number_list(obj: &Map<String, Value>, field: &str) -> ApiResult<Option<Vec<f64>>> {
    match obj.get(field) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| {
                v.as_f64()
                    .ok_or_else(|| ApiError::field(field, "entries must be numbers"))
            })
            .collect::<ApiResult<Vec<_>>>()
            .map(Some),
        Some(_) => Err(ApiError::field(field, "must be a list of numbers")),
    }
}

fn tolerance_override(
    obj: &Map<String, Value>,
    problem: &PortfolioProblem,
) -> ApiResult<PortfolioProblem> {
    let Some(value) = obj.get("risk_tolerance").filter(|v| !v.is_null()) else {
        return Ok(problem.clone());
    };
    let (lo, hi) = match value {
        Value::Array(pair) if pair.len() == 2 => (pair[0].as_f64(), pair[1].as_f64()),
        Value::Object(m) => (
            m.get("lower").and_then(Value::as_f64),
            m.get("upper").and_then(Value::as_f64),
        ),
        _ => (None, None),
    };
    let (Some(lo), Some(hi)) = (lo, hi) else {
        return Err(ApiError::field(
            "risk_tolerance",
            "expected [lower, upper] or {lower, upper}",
        ));
    };
    let interval =
        Interval::new(lo, hi).map_err(|e| ApiError::field("risk_tolerance", e.to_string()))?;
    Ok(problem.with_risk_tolerance(interval)?)
}

fn session(state: &AppState, id: &str) -> ApiResult<Arc<SessionProblem>> {
    state.get(id).ok_or_else(|| ApiError::not_found(id))
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> ApiResult<T> + Send + 'static,
) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?
}

async fn health() -> Json<Value> {
    Json(json!({ "status": "ok" }))
}

async fn create_problem(State(state): State<AppState>, body: Bytes) -> ApiResult<Json<Value>> {
    let obj = json_object(&body)?;
    reject_unknown(&obj, &["history", "config"])?;
    let history_text = match obj.get("history") {
        Some(Value::String(s)) => s,
        Some(_) => return Err(ApiError::field("history", "must be CSV text")),
        None => return Err(ApiError::field("history", "missing required field")),
    };
    let config_value = match obj.get("config") {
        Some(Value::String(s)) => serde_json::from_str(s)
            .map_err(|e| ApiError::field("config", format!("malformed JSON: {e}")))?,
        Some(v) => v.clone(),
        None => return Err(ApiError::field("config", "missing required field")),
    };
    let history = parse_history_str(history_text)?;
    let config = config_from_value(&config_value)?;
    let problem = config.build_problem(history)?;
    let summary = UniverseSummary::new(&problem, &config)?;
    let session = state.insert(SessionProblem {
        id: uuid::Uuid::new_v4().to_string(),
        problem,
        summary,
        created_at: SystemTime::now(),
    });
    Ok(Json(
        json!({ "id": session.id, "summary": session.summary }),
    ))
}

async fn get_problem(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Json<Value>> {
    let session = session(&state, &id)?;
    Ok(Json(
        json!({ "id": session.id, "summary": session.summary }),
    ))
}

async fn solve(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<SolutionDocument>> {
    let session = session(&state, &id)?;
    let obj = json_object(&body)?;
    reject_unknown(&obj, &["alpha", "lambda", "risk_tolerance"])?;
    let alpha = number(&obj, "alpha")?;
    let lambda = number(&obj, "lambda")?;
    let problem = tolerance_override(&obj, &session.problem)?;
    let doc = blocking(move || {
        let solution = solve_portfolio(&problem, alpha, lambda)?;
        Ok(SolutionDocument::new(&problem, solution))
    })
    .await?;
    Ok(Json(doc))
}

async fn run_sweep(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Response> {
    let session = session(&state, &id)?;
    let obj = if body.iter().all(u8::is_ascii_whitespace) {
        Map::new()
    } else {
        json_object(&body)?
    };
    reject_unknown(&obj, &["alphas", "lambdas", "risk_tolerance"])?;
    let alphas = number_list(&obj, "alphas")?.unwrap_or_else(default_alphas);
    let lambdas = number_list(&obj, "lambdas")?.unwrap_or_else(default_lambdas);
    let problem = tolerance_override(&obj, &session.problem)?;
    let table = blocking(move || Ok(sweep(&problem, &alphas, &lambdas)?)).await?;
    Ok(Json(table).into_response())
}

/// All routes with a permissive CORS layer.
pub fn router(state: AppState) -> Router {
    router_with_cors(state, &CorsPolicy::Any)
}

pub fn router_with_cors(state: AppState, cors: &CorsPolicy) -> Router {
    let origins = match cors {
        CorsPolicy::Any => AllowOrigin::any(),
        CorsPolicy::Origins(list) => AllowOrigin::list(
            list.iter()
                .filter_map(|o| HeaderValue::from_str(o).ok())
                .collect::<Vec<_>>(),
        ),
    };
    let cors = CorsLayer::new()
        .allow_origin(origins)
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([axum::http::header::CONTENT_TYPE]);
    Router::new()
        .route("/api/health", get(health))
        .route("/api/problems", post(create_problem))
        .route("/api/problems/{id}", get(get_problem))
        .route("/api/problems/{id}/solve", post(solve))
        .route("/api/problems/{id}/sweep", post(run_sweep))
        .layer(cors)
        .with_state(state)
}

/// Serve `app` on `listener` until `shutdown` resolves, then drain
/// in-flight requests.
pub async fn serve(
    listener: TcpListener,
    app: Router,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, app)
        .with_graceful_shutdown(shutdown)
        .await
}

/// Port from `SATPORT_PORT`, else the default.
pub fn port_from_env() -> Result<u16, String> {
    match std::env::var(PORT_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| format!("{PORT_ENV}={v:?} is not a port number")),
        Err(_) => Ok(DEFAULT_PORT),
    }
}
