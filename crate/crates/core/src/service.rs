//! JSON-over-HTTP facade over scoring, storage and analytics.
//!
//! Every request carries `Authorization: Bearer <token>`. Tokens map to one of
//! two roles: administrators may create, replace and delete experiments;
//! researchers may read everything and launch runs.
//!
//! | method | path                    | role        |
//! |--------|-------------------------|-------------|
//! | GET    | /experiments            | any         |
//! | GET    | /experiments/{id}       | any         |
//! | PUT    | /experiments/{id}       | admin       |
//! | DELETE | /experiments/{id}       | admin       |
//! | GET    | /runs                   | any         |
//! | POST   | /runs                   | any         |
//! | GET    | /runs/{id}              | any         |
//! | GET    | /runs/{id}/report.csv   | any         |
//!
//! Runs execute in the background; at most one run per experiment executes at
//! a time and later submissions wait their turn.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::Path;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, State};
use axum::http::{header, HeaderMap, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use chrono::Utc;
use serde::{Deserialize, Serialize};
use tokio::sync::{Mutex, RwLock};
use tower_http::cors::{AllowOrigin, CorsLayer};

use crate::analytics::{AdviseThresholds, GroundTruth, RunReport};
use crate::error::{Error, Result};
use crate::evaluate::{EvalOptions, Evaluator, SiteSpec};
use crate::model::Experiment;
use crate::store::{report, RunRecord, RunSummary, Store};

pub const DEFAULT_LISTEN: &str = "127.0.0.1:8470";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Administrator,
    Researcher,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenEntry {
    pub token: String,
    pub role: Role,
}

#[derive(Debug, Deserialize)]
struct TokenFile {
    tokens: Vec<TokenEntry>,
}

/// Reads a TOML file of `[[tokens]]` entries with `token` and `role`.
pub fn load_tokens(path: impl AsRef<Path>) -> Result<Vec<TokenEntry>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: TokenFile =
        toml::from_str(&text).map_err(|e| Error::Validation(format!("{}: {e}", path.display())))?;
    if file.tokens.iter().any(|t| t.token.is_empty()) {
        return Err(Error::Validation("empty token".into()));
    }
    Ok(file.tokens)
}

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub listen: SocketAddr,
    pub tokens: Vec<TokenEntry>,
    /// Allowed browser origin; `None` allows any origin.
    pub cors_origin: Option<String>,
    pub eval: EvalOptions,
    pub thresholds: AdviseThresholds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Pending,
    Done,
    Failed,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunView {
    pub run_id: String,
    pub experiment_id: String,
    pub status: RunStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run: Option<RunRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<RunReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub struct AppState {
    store: Store,
    evaluator: Evaluator,
    tokens: HashMap<String, Role>,
    thresholds: AdviseThresholds,
    runs: RwLock<HashMap<String, RunView>>,
    experiment_locks: Mutex<HashMap<String, Arc<Mutex<()>>>>,
}

impl AppState {
    pub fn new(store: Store, config: &ServiceConfig) -> Result<Arc<Self>> {
        Ok(Arc::new(AppState {
            store,
            evaluator: Evaluator::new(config.eval.clone())?,
            tokens: config.tokens.iter().map(|t| (t.token.clone(), t.role)).collect(),
            thresholds: config.thresholds,
            runs: RwLock::new(HashMap::new()),
            experiment_locks: Mutex::new(HashMap::new()),
        }))
    }

    fn role(&self, headers: &HeaderMap) -> std::result::Result<Role, ApiError> {
        headers
            .get(header::AUTHORIZATION)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.strip_prefix("Bearer "))
            .and_then(|t| self.tokens.get(t.trim()).copied())
            .ok_or(ApiError::new(StatusCode::UNAUTHORIZED, "missing or invalid bearer token"))
    }

    fn admin(&self, headers: &HeaderMap) -> std::result::Result<(), ApiError> {
        match self.role(headers)? {
            Role::Administrator => Ok(()),
            Role::Researcher => Err(ApiError::new(
                StatusCode::FORBIDDEN,
                "researchers may not modify experiments",
            )),
        }
    }

    async fn experiment_lock(&self, id: &str) -> Arc<Mutex<()>> {
        self.experiment_locks
            .lock()
            .await
            .entry(id.to_string())
            .or_default()
            .clone()
    }
}

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
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::UnknownExperiment(_) | Error::UnknownRun(_) => StatusCode::NOT_FOUND,
            Error::Internal(_) | Error::Io { .. } => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        ApiError::new(status, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(serde_json::json!({ "error": self.message }))).into_response()
    }
}

type ApiResult<T> = std::result::Result<T, ApiError>;

pub fn router(state: Arc<AppState>, cors_origin: Option<&str>) -> Router {
    let origin = match cors_origin.and_then(|o| HeaderValue::from_str(o).ok()) {
        Some(o) => AllowOrigin::exact(o),
        None => AllowOrigin::any(),
    };
    let cors = CorsLayer::new()
        .allow_origin(origin)
        .allow_methods([Method::GET, Method::POST, Method::PUT, Method::DELETE])
        .allow_headers([header::AUTHORIZATION, header::CONTENT_TYPE]);

    Router::new()
        .route("/experiments", get(list_experiments))
        .route(
            "/experiments/{id}",
            get(get_experiment).put(put_experiment).delete(delete_experiment),
        )
        .route("/runs", get(list_runs).post(create_run))
        .route("/runs/{id}", get(get_run))
        .route("/runs/{id}/report.csv", get(export_run))
        .layer(cors)
        .with_state(state)
}

pub async fn serve(store: Store, config: ServiceConfig) -> Result<()> {
    let state = AppState::new(store, &config)?;
    let app = router(state, config.cors_origin.as_deref());
    let listener = tokio::net::TcpListener::bind(config.listen)
        .await
        .map_err(|e| Error::io(config.listen.to_string(), e))?;
    axum::serve(listener, app)
        .await
        .map_err(|e| Error::Internal(e.to_string()))
}

async fn list_experiments(State(s): State<Arc<AppState>>, headers: HeaderMap) -> ApiResult<Json<Vec<Experiment>>> {
    s.role(&headers)?;
    let experiments = s
        .store
        .list_experiments()?
        .iter()
        .map(|id| s.store.load_experiment(id))
        .collect::<Result<Vec<_>>>()?;
    Ok(Json(experiments))
}

async fn get_experiment(
    State(s): State<Arc<AppState>>,
    headers: HeaderMap,
    UrlPath(id): UrlPath<String>,
) -> ApiResult<Json<Experiment>> {
    s.role(&headers)?;
    Ok(Json(s.store.load_experiment(&id)?))
}

async fn put_experiment(
    State(s): State<Arc<AppState>>,
    headers: HeaderMap,
    UrlPath(id): UrlPath<String>,
    body: Bytes,
) -> ApiResult<Json<Experiment>> {
    s.admin(&headers)?;
    let experiment: Experiment = serde_json::from_slice(&body)
        .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))?;
    if experiment.id != id {
        return Err(ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            format!("body id `{}` does not match path id `{id}`", experiment.id),
        ));
    }
    s.store.save_experiment(&experiment)?;
    Ok(Json(experiment))
}

async fn delete_experiment(
    State(s): State<Arc<AppState>>,
    headers: HeaderMap,
    UrlPath(id): UrlPath<String>,
) -> ApiResult<StatusCode> {
    s.admin(&headers)?;
    s.store.delete_experiment(&id)?;
    Ok(StatusCode::NO_CONTENT)
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum SiteInput {
    Locator(String),
    Labeled { label: String, locator: String },
}

impl From<SiteInput> for SiteSpec {
    fn from(s: SiteInput) -> Self {
        match s {
            SiteInput::Locator(l) => SiteSpec::new(l),
            SiteInput::Labeled { label, locator } => SiteSpec::labeled(label, locator),
        }
    }
}

#[derive(Debug, Deserialize)]
pub struct CreateRun {
    pub experiment_id: String,
    pub sites: Vec<SiteInput>,
    #[serde(default)]
    pub ground_truth_csv: Option<String>,
}

async fn list_runs(State(s): State<Arc<AppState>>, headers: HeaderMap) -> ApiResult<Json<Vec<RunSummary>>> {
    s.role(&headers)?;
    Ok(Json(s.store.list_runs(None)?))
}

async fn create_run(State(s): State<Arc<AppState>>, headers: HeaderMap, body: Bytes) -> ApiResult<Response> {
    s.role(&headers)?;
    let req: CreateRun = serde_json::from_slice(&body)
        .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))?;
    if req.sites.is_empty() {
        return Err(ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "site list is empty"));
    }
    let experiment = s.store.load_experiment(&req.experiment_id).map_err(|e| match e {
        Error::UnknownExperiment(_) => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()),
        other => other.into(),
    })?;
    let truth = req
        .ground_truth_csv
        .as_deref()
        .map(GroundTruth::from_csv)
        .transpose()?;
    let sites: Vec<SiteSpec> = req.sites.into_iter().map(SiteSpec::from).collect();

    let started_at = Utc::now();
    let run_id = RunRecord::new_id(started_at);
    s.runs.write().await.insert(
        run_id.clone(),
        RunView {
            run_id: run_id.clone(),
            experiment_id: experiment.id.clone(),
            status: RunStatus::Pending,
            run: None,
            report: None,
            error: None,
        },
    );

    let state = s.clone();
    let id = run_id.clone();
    tokio::spawn(async move {
        let lock = state.experiment_lock(&experiment.id).await;
        let _guard = lock.lock().await;
        let outcome = execute_run(&state, &experiment, &sites, truth.as_ref(), &id).await;
        let mut runs = state.runs.write().await;
        if let Some(view) = runs.get_mut(&id) {
            match outcome {
                Ok((record, report)) => {
                    view.status = RunStatus::Done;
                    view.run = Some(record);
                    view.report = Some(report);
                }
                Err(e) => {
                    view.status = RunStatus::Failed;
                    view.error = Some(e.to_string());
                }
            }
        }
    });

    Ok((
        StatusCode::ACCEPTED,
        Json(serde_json::json!({ "run_id": run_id, "status": RunStatus::Pending })),
    )
        .into_response())
}

async fn execute_run(
    state: &AppState,
    experiment: &Experiment,
    sites: &[SiteSpec],
    truth: Option<&GroundTruth>,
    run_id: &str,
) -> Result<(RunRecord, RunReport)> {
    let mut record = state.evaluator.run_batch(experiment, sites).await?;
    record.run_id = run_id.to_string();
    let report = RunReport::build(&record.site_scores, experiment, truth, &state.thresholds)?;
    state.store.save_run(&record)?;
    state.store.export_report(&record, &report)?;
    Ok((record, report))
}

async fn lookup_run(s: &AppState, id: &str) -> ApiResult<RunView> {
    if let Some(view) = s.runs.read().await.get(id) {
        return Ok(view.clone());
    }
    // runs from earlier sessions or the CLI
    let record = s.store.load_run(id)?;
    let report = s
        .store
        .load_experiment(&record.experiment_id)
        .ok()
        .and_then(|e| RunReport::build(&record.site_scores, &e, None, &s.thresholds).ok());
    Ok(RunView {
        run_id: record.run_id.clone(),
        experiment_id: record.experiment_id.clone(),
        status: RunStatus::Done,
        run: Some(record),
        report,
        error: None,
    })
}

async fn get_run(
    State(s): State<Arc<AppState>>,
    headers: HeaderMap,
    UrlPath(id): UrlPath<String>,
) -> ApiResult<Json<RunView>> {
    s.role(&headers)?;
    Ok(Json(lookup_run(&s, &id).await?))
}

async fn export_run(
    State(s): State<Arc<AppState>>,
    headers: HeaderMap,
    UrlPath(id): UrlPath<String>,
) -> ApiResult<Response> {
    s.role(&headers)?;
    let view = lookup_run(&s, &id).await?;
    let record = match (view.status, view.run) {
        (RunStatus::Done, Some(run)) => run,
        (RunStatus::Failed, _) => {
            return Err(ApiError::new(
                StatusCode::CONFLICT,
                view.error.unwrap_or_else(|| "run failed".into()),
            ))
        }
        _ => return Err(ApiError::new(StatusCode::CONFLICT, "run is still pending")),
    };
    let body = report::scores_csv(&record);
    Ok((
        [
            (header::CONTENT_TYPE, "text/csv; charset=utf-8".to_string()),
            (
                header::CONTENT_DISPOSITION,
                format!("attachment; filename=\"{}-{}\"", record.run_id, report::SCORES_FILE),
            ),
        ],
        body,
    )
        .into_response())
}

#[cfg(test)]
impl AppState {
    /// Registers a pending run without executing it.
    pub(crate) async fn insert_pending(&self, run_id: &str, experiment_id: &str) {
        self.runs.write().await.insert(
            run_id.to_string(),
            RunView {
                run_id: run_id.to_string(),
                experiment_id: experiment_id.to_string(),
                status: RunStatus::Pending,
                run: None,
                report: None,
                error: None,
            },
        );
    }
}
