//! HTTP API over a pipeline snapshot, plus collaboration rooms.
//!
//! Reads clone an `Arc` to the current [`Snapshot`] and never block on
//! writers. Writes that change analytical state (overrides, corpus uploads,
//! topic config) are serialized and publish a whole new snapshot.

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::{Path, Query, Request, State};
use axum::http::{header, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, patch, post};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;
use voidlens::bot::BotModel;
use voidlens::ingest::{parse_corpus, Source};
use voidlens::pipeline::{self, annotate, summary_options, PipelineOutput, PipelineSettings};
use voidlens::source::{categorize_all, OverrideStore, SourceCategory};
use voidlens::topic::{train_topic_model, weak_label, TopicConfig, TopicModel};
use voidlens::void::{deep_dive, detect_voids, summarize_with, AnnotatedPost, DashboardSummary, VoidThresholds};
use voidlens::{Category, Corpus, KnowledgeBase, Leaning};

use crate::collab::{CollabError, RoomStore};
use crate::translate::{IdentityTranslator, TranslateRequest, TranslateResponse, Translator};

const DEFAULT_POLL_MS: u64 = 25_000;
const MAX_POLL_MS: u64 = 60_000;

/// Trained models kept so uploads can be re-annotated without retraining.
#[derive(Debug, Clone)]
pub struct Models {
    pub topic: TopicModel,
    pub bot: BotModel,
}

/// Immutable pipeline state served to readers.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub corpus: Arc<Corpus>,
    pub config: TopicConfig,
    pub settings: PipelineSettings,
    pub models: Option<Models>,
    pub categories: BTreeMap<String, SourceCategory>,
    pub annotated: Vec<AnnotatedPost>,
    pub summary: DashboardSummary,
}

impl Snapshot {
    pub fn from_output(corpus: Corpus, config: TopicConfig, settings: PipelineSettings, out: PipelineOutput) -> Self {
        Snapshot {
            corpus: Arc::new(corpus),
            config,
            settings,
            models: Some(Models { topic: out.topic_model, bot: out.bot_model }),
            categories: out.categories,
            annotated: out.annotated,
            summary: out.summary,
        }
    }

    /// Serves already annotated posts. Without models, uploads and topic
    /// changes are rejected.
    pub fn from_annotated(
        annotated: Vec<AnnotatedPost>,
        config: TopicConfig,
        settings: PipelineSettings,
        generated_at: DateTime<Utc>,
    ) -> voidlens::Result<Self> {
        let mut sources: BTreeMap<String, Source> = BTreeMap::new();
        let mut categories = BTreeMap::new();
        for ap in &annotated {
            sources.entry(ap.post.source_id.clone()).or_insert_with(|| Source {
                source_id: ap.post.source_id.clone(),
                name: ap.source_name.clone(),
                description: String::new(),
                kind_hint: voidlens::ingest::SourceKind::Page,
            });
            categories.insert(ap.post.source_id.clone(), ap.source_category.clone());
        }
        let corpus = Corpus::from_parts(annotated.iter().map(|a| a.post.clone()).collect(), sources.into_values().collect())?;
        let summary = summarize_with(&annotated, &summary_options(&config, &settings, generated_at));
        Ok(Snapshot {
            corpus: Arc::new(corpus),
            config,
            settings,
            models: None,
            categories,
            annotated,
            summary,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobKind {
    Corpus,
    Topics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobState {
    Running,
    Succeeded,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobStatus {
    pub job_id: u64,
    pub kind: JobKind,
    pub state: JobState,
    pub submitted_at: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finished_at: Option<DateTime<Utc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub post_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rejected_lines: Option<usize>,
}

pub struct ServiceOptions {
    /// Required as `Authorization: Bearer <token>` on every route but
    /// `/health` when set.
    pub token: Option<String>,
    /// Room storage; rooms are in memory when `None`.
    pub data_dir: Option<PathBuf>,
    pub translator: Arc<dyn Translator>,
}

impl Default for ServiceOptions {
    fn default() -> Self {
        Self { token: None, data_dir: None, translator: Arc::new(IdentityTranslator) }
    }
}

pub struct AppState {
    snapshot: RwLock<Arc<Snapshot>>,
    kb: Arc<KnowledgeBase>,
    overrides: Mutex<OverrideStore>,
    writer: tokio::sync::Mutex<()>,
    jobs: Mutex<BTreeMap<u64, JobStatus>>,
    next_job: AtomicU64,
    rooms: RoomStore,
    token: Option<String>,
    translator: Arc<dyn Translator>,
}

impl AppState {
    pub fn new(snapshot: Snapshot, kb: KnowledgeBase, overrides: OverrideStore, opts: ServiceOptions) -> Arc<Self> {
        let rooms = match &opts.data_dir {
            Some(d) => RoomStore::open(d),
            None => RoomStore::in_memory(),
        };
        Arc::new(AppState {
            snapshot: RwLock::new(Arc::new(snapshot)),
            kb: Arc::new(kb),
            overrides: Mutex::new(overrides),
            writer: tokio::sync::Mutex::new(()),
            jobs: Mutex::new(BTreeMap::new()),
            next_job: AtomicU64::new(1),
            rooms,
            token: opts.token,
            translator: opts.translator,
        })
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.snapshot.read().expect("snapshot lock poisoned").clone()
    }

    fn publish(&self, snap: Snapshot) {
        *self.snapshot.write().expect("snapshot lock poisoned") = Arc::new(snap);
    }

    pub fn rooms(&self) -> &RoomStore {
        &self.rooms
    }

    pub fn job(&self, id: u64) -> Option<JobStatus> {
        self.jobs.lock().expect("jobs poisoned").get(&id).cloned()
    }

    fn update_job(&self, id: u64, f: impl FnOnce(&mut JobStatus)) {
        if let Some(j) = self.jobs.lock().expect("jobs poisoned").get_mut(&id) {
            f(j);
        }
    }
}

/// JSON error body: `{"error": ..., "field": ...}`.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub message: String,
    pub field: Option<String>,
    pub extra: Option<serde_json::Value>,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError { status, message: message.into(), field: None, extra: None }
    }

    fn bad_field(field: &str, message: impl Into<String>) -> Self {
        ApiError { field: Some(field.to_string()), ..Self::new(StatusCode::BAD_REQUEST, message) }
    }

    fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.message });
        if let Some(f) = self.field {
            body["field"] = json!(f);
        }
        if let Some(serde_json::Value::Object(extra)) = self.extra {
            body.as_object_mut().expect("object").extend(extra);
        }
        (self.status, Json(body)).into_response()
    }
}

impl From<voidlens::Error> for ApiError {
    fn from(e: voidlens::Error) -> Self {
        use voidlens::Error as E;
        let status = match &e {
            E::NotFound { .. } => StatusCode::NOT_FOUND,
            E::ConfigMismatch { .. } => StatusCode::CONFLICT,
            e if e.is_validation() => StatusCode::BAD_REQUEST,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, e.to_string())
    }
}

impl From<CollabError> for ApiError {
    fn from(e: CollabError) -> Self {
        match e {
            CollabError::InvalidRoomId(_) => ApiError::bad_field("room_id", e.to_string()),
            CollabError::Empty(field) => ApiError::bad_field(field, e.to_string()),
            CollabError::Io { .. } | CollabError::Corrupt { .. } => {
                log::error!("{e}");
                ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string())
            }
        }
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// Field named by a serde error message, e.g. "missing field `text`".
fn serde_field(msg: &str) -> Option<&str> {
    let start = msg.find('`')? + 1;
    let len = msg[start..].find('`')?;
    Some(&msg[start..start + len])
}

fn parse_body<T: DeserializeOwned>(body: &[u8]) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| {
        let msg = e.to_string();
        let field = serde_field(&msg).unwrap_or("body").to_string();
        ApiError { field: Some(field), ..ApiError::new(StatusCode::BAD_REQUEST, msg) }
    })
}

fn query_f64(q: &HashMap<String, String>, key: &str, default: f64) -> ApiResult<f64> {
    match q.get(key) {
        None => Ok(default),
        Some(v) => match v.parse::<f64>() {
            Ok(x) if x.is_finite() && x >= 0.0 => Ok(x),
            _ => Err(ApiError::bad_field(key, format!("{key} must be a non-negative number"))),
        },
    }
}

fn query_u64(q: &HashMap<String, String>, key: &str, default: u64) -> ApiResult<u64> {
    q.get(key)
        .map_or(Ok(default), |v| v.parse().map_err(|_| ApiError::bad_field(key, format!("{key} must be a non-negative integer"))))
}

async fn require_token(State(state): State<Arc<AppState>>, req: Request, next: Next) -> Response {
    if let Some(token) = &state.token {
        let ok = req.uri().path() == "/health"
            || req
                .headers()
                .get(header::AUTHORIZATION)
                .and_then(|v| v.to_str().ok())
                .and_then(|v| v.strip_prefix("Bearer "))
                .is_some_and(|t| t == token);
        if !ok {
            return ApiError::new(StatusCode::UNAUTHORIZED, "missing or invalid bearer token").into_response();
        }
    }
    next.run(req).await
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/summary", get(summary))
        .route("/topics", get(topics))
        .route("/topics/{topic}/posts", get(topic_posts))
        .route("/voids", get(voids))
        .route("/corpus", post(upload_corpus))
        .route("/jobs/{id}", get(job_status))
        .route("/config/topics", get(get_topic_config).post(set_topic_config))
        .route("/sources", get(list_sources))
        .route("/sources/{id}", get(get_source))
        .route("/sources/{id}/category", patch(set_category))
        .route("/rooms/{id}", get(room_info))
        .route("/rooms/{id}/messages", get(list_messages).post(post_message))
        .route("/rooms/{id}/events", get(room_events))
        .route("/rooms/{id}/draft", get(get_draft).put(put_draft))
        .route("/translate", post(translate))
        .layer(middleware::from_fn_with_state(state.clone(), require_token))
        .with_state(state)
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    state: Arc<AppState>,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await
}

async fn health(State(state): State<Arc<AppState>>) -> Json<serde_json::Value> {
    let snap = state.snapshot();
    let running = state.jobs.lock().expect("jobs poisoned").values().filter(|j| j.state == JobState::Running).count();
    Json(json!({
        "status": "ok",
        "post_count": snap.summary.meta.post_count,
        "config_hash": snap.config.hash(),
        "jobs_running": running,
    }))
}

async fn summary(State(state): State<Arc<AppState>>) -> Response {
    Json(state.snapshot().summary.clone()).into_response()
}

async fn topics(State(state): State<Arc<AppState>>) -> Json<serde_json::Value> {
    let snap = state.snapshot();
    Json(json!({ "topics": snap.config.names(), "config_hash": snap.config.hash() }))
}

async fn topic_posts(
    State(state): State<Arc<AppState>>,
    Path(topic): Path<String>,
    Query(q): Query<HashMap<String, String>>,
) -> ApiResult<Response> {
    let leaning = q
        .get("leaning")
        .filter(|v| !v.is_empty())
        .map(|v| v.parse::<Leaning>().map_err(|e| ApiError::bad_field("leaning", e)))
        .transpose()?;
    let limit = q.get("limit").map(|_| query_u64(&q, "limit", 0)).transpose()?;
    let snap = state.snapshot();
    let posts = deep_dive(&snap.annotated, &snap.config.names(), &topic, leaning)?;
    let n = limit.map_or(posts.len(), |l| (l as usize).min(posts.len()));
    Ok(Json(&posts[..n]).into_response())
}

async fn voids(State(state): State<Arc<AppState>>, Query(q): Query<HashMap<String, String>>) -> ApiResult<Response> {
    let snap = state.snapshot();
    let d = snap.settings.thresholds;
    let thresholds = VoidThresholds {
        alpha: query_f64(&q, "alpha", d.alpha)?,
        tau: query_f64(&q, "tau", d.tau)?,
        tau_source: query_f64(&q, "tau_source", d.tau_source)?,
    };
    Ok(Json(detect_voids(&snap.summary, &thresholds)).into_response())
}

async fn job_status(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<JobStatus>> {
    id.parse()
        .ok()
        .and_then(|id| state.job(id))
        .map(Json)
        .ok_or_else(|| ApiError::not_found(format!("job not found: {id}")))
}

fn check_expected_hash(snap: &Snapshot, expected: Option<&str>) -> ApiResult<()> {
    let current = snap.config.hash();
    match expected {
        Some(e) if e != current => Err(ApiError {
            extra: Some(json!({ "current_config_hash": current })),
            ..ApiError::new(StatusCode::CONFLICT, format!("config hash mismatch: expected {e}, current {current}"))
        }),
        _ => Ok(()),
    }
}

fn require_models(snap: &Snapshot) -> ApiResult<()> {
    if snap.models.is_none() {
        return Err(ApiError::new(StatusCode::CONFLICT, "no trained models loaded; re-annotation unavailable"));
    }
    Ok(())
}

/// Starts `work` as a background job holding the writer lock. `work`
/// returns the snapshot to publish plus the post and reject counts.
fn spawn_job<F>(state: &Arc<AppState>, kind: JobKind, work: F) -> u64
where
    F: FnOnce(Arc<AppState>, Arc<Snapshot>) -> Result<(Snapshot, usize, usize), String> + Send + 'static,
{
    let id = state.next_job.fetch_add(1, Ordering::Relaxed);
    state.jobs.lock().expect("jobs poisoned").insert(
        id,
        JobStatus {
            job_id: id,
            kind,
            state: JobState::Running,
            submitted_at: Utc::now(),
            finished_at: None,
            error: None,
            post_count: None,
            rejected_lines: None,
        },
    );
    let state = state.clone();
    tokio::spawn(async move {
        let _w = state.writer.lock().await;
        let base = state.snapshot();
        let st = state.clone();
        let result = tokio::task::spawn_blocking(move || work(st, base))
            .await
            .unwrap_or_else(|e| Err(format!("job panicked: {e}")));
        match result {
            Ok((snap, posts, rejected)) => {
                state.publish(snap);
                state.update_job(id, |j| {
                    j.state = JobState::Succeeded;
                    j.post_count = Some(posts);
                    j.rejected_lines = Some(rejected);
                    j.finished_at = Some(Utc::now());
                });
            }
            Err(e) => {
                log::warn!("job {id} failed: {e}");
                state.update_job(id, |j| {
                    j.state = JobState::Failed;
                    j.error = Some(e);
                    j.finished_at = Some(Utc::now());
                });
            }
        }
    });
    id
}

/// Re-annotates `corpus` with existing models and the current overrides.
fn reannotate(
    state: &AppState,
    corpus: Corpus,
    config: TopicConfig,
    settings: PipelineSettings,
    models: Models,
) -> voidlens::Result<Snapshot> {
    let categories = categorize_all(corpus.sources(), &state.kb, &state.overrides.lock().expect("overrides poisoned"));
    let annotated = annotate(&corpus, &state.kb, &categories, &config, &models.topic, &models.bot, settings.epsilon)?;
    let summary = summarize_with(&annotated, &summary_options(&config, &settings, Utc::now()));
    Ok(Snapshot {
        corpus: Arc::new(corpus),
        config,
        settings,
        models: Some(models),
        categories,
        annotated,
        summary,
    })
}

#[derive(Debug, Deserialize)]
struct CorpusUpload {
    /// posts.jsonl content.
    posts: String,
    /// sources.jsonl content.
    sources: String,
    #[serde(default)]
    expected_config_hash: Option<String>,
}

async fn upload_corpus(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult<Response> {
    let upload: CorpusUpload = parse_body(&body)?;
    let snap = state.snapshot();
    check_expected_hash(&snap, upload.expected_config_hash.as_deref())?;
    require_models(&snap)?;
    let id = spawn_job(&state, JobKind::Corpus, move |state, base| {
        let parsed = parse_corpus(upload.posts.as_bytes(), upload.sources.as_bytes()).map_err(|e| e.to_string())?;
        let models = base.models.clone().ok_or("no trained models loaded")?;
        let rejected = parsed.rejects.len();
        let n = parsed.corpus.len();
        let snap = reannotate(&state, parsed.corpus, base.config.clone(), base.settings.clone(), models)
            .map_err(|e| e.to_string())?;
        Ok((snap, n, rejected))
    });
    Ok((StatusCode::ACCEPTED, Json(json!({ "job_id": id }))).into_response())
}

async fn get_topic_config(State(state): State<Arc<AppState>>) -> Json<TopicConfig> {
    Json(state.snapshot().config.clone())
}

#[derive(Debug, Deserialize)]
struct TopicConfigUpdate {
    #[serde(flatten)]
    config: TopicConfig,
    #[serde(default)]
    expected_config_hash: Option<String>,
}

async fn set_topic_config(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult<Response> {
    let update: TopicConfigUpdate = parse_body(&body)?;
    update.config.validate().map_err(|e| ApiError::bad_field("topics", e.to_string()))?;
    let snap = state.snapshot();
    check_expected_hash(&snap, update.expected_config_hash.as_deref())?;
    require_models(&snap)?;
    let config = update.config;
    let id = spawn_job(&state, JobKind::Topics, move |state, base| {
        let models = base.models.clone().ok_or("no trained models loaded")?;
        let labeled = weak_label(&base.corpus, &config, base.settings.seed);
        let topic = train_topic_model(&labeled, &base.corpus, base.settings.seed).map_err(|e| e.to_string())?;
        let corpus = (*base.corpus).clone();
        let n = corpus.len();
        let snap = reannotate(&state, corpus, config, base.settings.clone(), Models { topic, bot: models.bot })
            .map_err(|e| e.to_string())?;
        Ok((snap, n, 0))
    });
    Ok((StatusCode::ACCEPTED, Json(json!({ "job_id": id }))).into_response())
}

#[derive(Debug, Clone, Serialize)]
pub struct SourceView<'a> {
    #[serde(flatten)]
    pub source: &'a Source,
    pub category: Option<&'a SourceCategory>,
    pub post_count: usize,
}

fn source_views(snap: &Snapshot) -> Vec<SourceView<'_>> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for p in snap.corpus.posts() {
        *counts.entry(p.source_id.as_str()).or_default() += 1;
    }
    snap.corpus
        .sources()
        .iter()
        .map(|s| SourceView {
            source: s,
            category: snap.categories.get(&s.source_id),
            post_count: counts.get(s.source_id.as_str()).copied().unwrap_or(0),
        })
        .collect()
}

async fn list_sources(State(state): State<Arc<AppState>>) -> Response {
    let snap = state.snapshot();
    Json(source_views(&snap)).into_response()
}

async fn get_source(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Response> {
    let snap = state.snapshot();
    let views = source_views(&snap);
    let view = views
        .iter()
        .find(|v| v.source.source_id == id)
        .ok_or_else(|| ApiError::not_found(format!("source not found: {id}")))?;
    Ok(Json(view).into_response())
}

#[derive(Debug, Deserialize)]
struct CategoryUpdate {
    category: String,
}

async fn set_category(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<serde_json::Value>> {
    let update: CategoryUpdate = parse_body(&body)?;
    let category: Category = update.category.parse().map_err(|e: String| ApiError::bad_field("category", e))?;
    let _w = state.writer.lock().await;
    let base = state.snapshot();
    let st = state.clone();
    let source_id = id.clone();
    let (snap, cat) = tokio::task::spawn_blocking(move || -> ApiResult<(Snapshot, SourceCategory)> {
        let mut overrides = st.overrides.lock().expect("overrides poisoned");
        let cat = overrides.apply_override(&id, category, &pipeline::source_ids(&base.corpus))?;
        let categories = categorize_all(base.corpus.sources(), &st.kb, &overrides);
        drop(overrides);
        let mut annotated = base.annotated.clone();
        pipeline::recategorize(&mut annotated, &categories);
        let summary = summarize_with(&annotated, &summary_options(&base.config, &base.settings, Utc::now()));
        let snap = Snapshot { categories, annotated, summary, ..(*base).clone() };
        Ok((snap, cat))
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    state.publish(snap);
    Ok(Json(json!({ "source_id": source_id, "category": cat })))
}

async fn room_info(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Response> {
    Ok(Json(state.rooms.info(&id)?).into_response())
}

#[derive(Debug, Deserialize)]
struct NewMessage {
    author: String,
    text: String,
}

async fn post_message(State(state): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> ApiResult<Response> {
    let msg: NewMessage = parse_body(&body)?;
    let st = state.clone();
    let posted = tokio::task::spawn_blocking(move || st.rooms.post_message(&id, &msg.author, &msg.text))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    Ok((StatusCode::CREATED, Json(posted)).into_response())
}

async fn list_messages(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<HashMap<String, String>>,
) -> ApiResult<Response> {
    let after = query_u64(&q, "after", 0)?;
    Ok(Json(state.rooms.messages(&id, after)?).into_response())
}

/// Long-poll delivery: waits up to `timeout_ms` for messages after `after`.
async fn room_events(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<HashMap<String, String>>,
) -> ApiResult<Response> {
    let after = query_u64(&q, "after", 0)?;
    let timeout = query_u64(&q, "timeout_ms", DEFAULT_POLL_MS)?.min(MAX_POLL_MS);
    let messages = state.rooms.wait_messages(&id, after, Duration::from_millis(timeout)).await?;
    let last_seq = messages.last().map_or(after, |m| m.seq);
    Ok(Json(json!({ "messages": messages, "last_seq": last_seq })).into_response())
}

async fn get_draft(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Response> {
    Ok(Json(state.rooms.draft(&id)?).into_response())
}

#[derive(Debug, Deserialize)]
struct DraftUpdate {
    author: String,
    base_version: u64,
    text: String,
}

async fn put_draft(State(state): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> ApiResult<Response> {
    let update: DraftUpdate = parse_body(&body)?;
    let st = state.clone();
    let outcome = tokio::task::spawn_blocking(move || st.rooms.update_draft(&id, &update.author, update.base_version, &update.text))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    let status = if outcome.is_accepted() { StatusCode::OK } else { StatusCode::CONFLICT };
    Ok((status, Json(outcome)).into_response())
}

async fn translate(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult<Json<TranslateResponse>> {
    let req: TranslateRequest = parse_body(&body)?;
    let text = state
        .translator
        .translate(&req.text, &req.target)
        .map_err(|e| ApiError::new(StatusCode::BAD_GATEWAY, e))?;
    Ok(Json(TranslateResponse {
        text,
        target: req.target,
        provider: state.translator.name().to_string(),
        stub: state.translator.is_stub(),
    }))
}
