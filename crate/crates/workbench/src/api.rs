//! HTTP JSON API.
//!
//! Successful responses are objects carrying `graphVersion` next to one
//! named payload, e.g. `{"graphVersion": 12, "facetedGraph": {...}}`.
//! Session writes add `sessionVersion`. Errors are
//! `{"error": {"kind": .., "message": .., ...}}` with a matching status.

use std::collections::BTreeMap;
use std::convert::Infallible;
use std::future::Future;
use std::net::SocketAddr;
use std::sync::{Arc, RwLock, RwLockReadGuard, RwLockWriteGuard};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post, put};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use tokio::net::TcpListener;
use tokio::sync::{broadcast, oneshot, watch};
use workbench_core::analytics::AnalyticsError;
use workbench_core::ops::{self, OpError};
use workbench_core::workflows::{Decision, DecisionFile, SeedFile, WorkflowError};
use workbench_core::{CorpusError, GraphError, HistoryError, QueryError};

use crate::events::{EventHub, SelectionRequest};
use crate::store::{now_ms, StoreError, Workspace};

pub struct AppState {
    ws: RwLock<Workspace>,
    pub events: EventHub,
    shutdown: watch::Receiver<bool>,
}

impl AppState {
    pub fn new(ws: Workspace, shutdown: watch::Receiver<bool>) -> Self {
        AppState { ws: RwLock::new(ws), events: EventHub::new(), shutdown }
    }

    fn read(&self) -> RwLockReadGuard<'_, Workspace> {
        self.ws.read().unwrap_or_else(|p| p.into_inner())
    }

    fn write(&self) -> RwLockWriteGuard<'_, Workspace> {
        self.ws.write().unwrap_or_else(|p| p.into_inner())
    }
}

type Shared = Arc<AppState>;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    kind: &'static str,
    message: String,
    extra: Map<String, Value>,
}

impl ApiError {
    fn new(status: StatusCode, kind: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, kind, message: message.into(), extra: Map::new() }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = self.extra;
        body.insert("kind".into(), json!(self.kind));
        body.insert("message".into(), json!(self.message));
        (self.status, Json(json!({ "error": body }))).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::bad_request(r.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(r: QueryRejection) -> Self {
        ApiError::bad_request(r.body_text())
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        tracing::error!("persistence failed: {e}");
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "storage", e.to_string())
    }
}

impl From<QueryError> for ApiError {
    fn from(e: QueryError) -> Self {
        let message = e.to_string();
        match e {
            QueryError::Syntax { position, expected, found } => {
                let mut err = ApiError::new(StatusCode::BAD_REQUEST, "syntax", message);
                err.extra.insert("position".into(), json!(position));
                err.extra.insert("expected".into(), json!(expected));
                err.extra.insert("found".into(), json!(found));
                err
            }
            _ => ApiError::new(StatusCode::BAD_REQUEST, "invalid_query", message),
        }
    }
}

impl From<GraphError> for ApiError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::NotFound(_) => ApiError::not_found(e.to_string()),
            _ => ApiError::bad_request(e.to_string()),
        }
    }
}

impl From<AnalyticsError> for ApiError {
    fn from(e: AnalyticsError) -> Self {
        match e {
            AnalyticsError::NotFound(_) => ApiError::not_found(e.to_string()),
            AnalyticsError::InvalidCap => ApiError::bad_request(e.to_string()),
        }
    }
}

impl From<CorpusError> for ApiError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::NotFound(_) => ApiError::not_found(e.to_string()),
            _ => ApiError::bad_request(e.to_string()),
        }
    }
}

impl From<WorkflowError> for ApiError {
    fn from(e: WorkflowError) -> Self {
        match e {
            WorkflowError::Corpus(c) => c.into(),
            WorkflowError::Analytics(a) => a.into(),
            WorkflowError::UnknownSession(_) | WorkflowError::UnknownCandidate(_) => ApiError::not_found(e.to_string()),
            WorkflowError::SessionMerged(_) | WorkflowError::AlreadyMerged(_) => {
                ApiError::new(StatusCode::CONFLICT, "conflict", e.to_string())
            }
            _ => ApiError::bad_request(e.to_string()),
        }
    }
}

impl From<OpError> for ApiError {
    fn from(e: OpError) -> Self {
        match e {
            OpError::UnknownOperation(_) | OpError::BadParams(_) => ApiError::bad_request(e.to_string()),
            OpError::Graph(g) => g.into(),
            OpError::Query(q) => q.into(),
            OpError::Analytics(a) => a.into(),
            OpError::Corpus(c) => c.into(),
            OpError::Workflow(w) => w.into(),
        }
    }
}

impl From<HistoryError> for ApiError {
    fn from(e: HistoryError) -> Self {
        match e {
            HistoryError::NotFound(_) => ApiError::not_found(e.to_string()),
            HistoryError::Replay(op) => op.into(),
            _ => ApiError::bad_request(e.to_string()),
        }
    }
}

type ApiResult = Result<Json<Value>, ApiError>;

fn envelope(graph_version: u64, key: &str, payload: impl Serialize) -> Json<Value> {
    let payload = serde_json::to_value(payload).expect("payloads serialize");
    Json(json!({ "graphVersion": graph_version, key: payload }))
}

fn with_session_version(mut body: Json<Value>, version: u64) -> Json<Value> {
    body.0["sessionVersion"] = json!(version);
    body
}

fn body<T: DeserializeOwned>(b: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    Ok(b?.0)
}

/// Runs a registered read operation and wraps its result.
fn read_op(state: &AppState, op: &str, params: Value, key: &str) -> ApiResult {
    let ws = state.read();
    let result = ops::dispatch(op, &params, ws.snapshot())?;
    Ok(envelope(ws.graph.version(), key, result))
}

/// Query-string parameters, kept as strings and converted per operation.
type QueryMap = BTreeMap<String, String>;

fn query_params(q: Result<Query<QueryMap>, QueryRejection>) -> Result<QueryMap, ApiError> {
    Ok(q?.0)
}

fn int_param(q: &QueryMap, key: &str) -> Result<Option<usize>, ApiError> {
    q.get(key)
        .map(|v| v.parse::<usize>().map_err(|_| ApiError::bad_request(format!("{key} must be a non-negative integer"))))
        .transpose()
}

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/health", get(|| async { Json(json!({"status": "ok"})) }))
        .route("/graph/counts", get(counts))
        .route("/graph/faceted", get(faceted))
        .route("/graph/distribution/nodes", get(node_distribution))
        .route("/graph/distribution/relations", get(relation_distribution))
        .route("/graph/frequency", get(entity_frequency))
        .route("/graph/node/{id}", get(node))
        .route("/graph/node/{id}/degree", get(degree))
        .route("/graph/node/{id}/neighborhood", get(neighborhood))
        .route("/query", post(query))
        .route("/ingest/graph", post(ingest_graph))
        .route("/ingest/corpus", post(ingest_corpus))
        .route("/corpus/mentions", get(mentions))
        .route("/corpus/context", post(context))
        .route("/corpus/documents/{id}", get(document))
        .route("/sessions/seeds", get(list_seed_sessions).post(create_seed_session))
        .route("/sessions/seeds/suggest", get(suggest))
        .route("/sessions/seeds/import", post(import_seeds))
        .route("/sessions/seeds/{id}", get(seed_session))
        .route("/sessions/seeds/{id}/seeds", post(add_seed))
        .route("/sessions/seeds/{id}/seeds/{node}", delete(remove_seed))
        .route("/sessions/seeds/{id}/export", get(export_seeds))
        .route("/sessions/verify", get(list_verification_sessions).post(create_verification_session))
        .route("/sessions/verify/import", post(import_decisions))
        .route("/sessions/verify/{id}", get(verification_session))
        .route("/sessions/verify/{id}/candidates/{cid}", put(set_decision))
        .route("/sessions/verify/{id}/candidates/{cid}/context", get(candidate_context))
        .route("/sessions/verify/{id}/export", get(export_decisions))
        .route("/sessions/verify/{id}/merge", post(merge))
        .route("/history", get(list_history).post(record_history))
        .route("/history/{id}/restore", get(restore_history))
        .route("/events", get(subscribe).post(publish))
        .with_state(state)
}

// --- graph ---------------------------------------------------------------

async fn counts(State(s): State<Shared>) -> ApiResult {
    read_op(&s, "counts", json!({}), "counts")
}

async fn faceted(State(s): State<Shared>) -> ApiResult {
    read_op(&s, "faceted_graph", json!({}), "facetedGraph")
}

async fn node_distribution(State(s): State<Shared>) -> ApiResult {
    read_op(&s, "node_type_distribution", json!({}), "distribution")
}

async fn relation_distribution(State(s): State<Shared>, q: Result<Query<QueryMap>, QueryRejection>) -> ApiResult {
    let q = query_params(q)?;
    read_op(&s, "relation_type_distribution", json!({"node_type": q.get("type")}), "distribution")
}

async fn entity_frequency(State(s): State<Shared>, q: Result<Query<QueryMap>, QueryRejection>) -> ApiResult {
    let q = query_params(q)?;
    let t = q.get("type").ok_or_else(|| ApiError::bad_request("missing type"))?;
    read_op(&s, "entity_frequency", json!({"entity_type": t}), "distribution")
}

async fn node(State(s): State<Shared>, Path(id): Path<String>) -> ApiResult {
    read_op(&s, "get_node", json!({"node_id": id}), "node")
}

async fn degree(State(s): State<Shared>, Path(id): Path<String>) -> ApiResult {
    read_op(&s, "degree_profile", json!({"node_id": id}), "degreeProfile")
}

async fn neighborhood(
    State(s): State<Shared>,
    Path(id): Path<String>,
    q: Result<Query<QueryMap>, QueryRejection>,
) -> ApiResult {
    let q = query_params(q)?;
    let mut params = json!({"node_id": id, "depth": int_param(&q, "depth")?.unwrap_or(1)});
    if let Some(cap) = int_param(&q, "cap")? {
        params["cap"] = json!(cap);
    }
    if let Some(rel) = q.get("rel") {
        params["rel"] = json!(rel);
    }
    read_op(&s, "neighborhood", params, "subgraph")
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QueryBody {
    query: String,
}

async fn query(State(s): State<Shared>, b: Result<Json<QueryBody>, JsonRejection>) -> ApiResult {
    let b = body(b)?;
    read_op(&s, "query", json!({"query": b.query}), "resultTable")
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphIngestBody {
    #[serde(default)]
    nodes: Vec<Value>,
    #[serde(default)]
    edges: Vec<Value>,
}

fn as_lines(records: &[Value]) -> Vec<String> {
    records.iter().map(Value::to_string).collect()
}

async fn ingest_graph(State(s): State<Shared>, b: Result<Json<GraphIngestBody>, JsonRejection>) -> ApiResult {
    let b = body(b)?;
    let (nodes, edges) = (as_lines(&b.nodes), as_lines(&b.edges));
    let mut ws = s.write();
    let report = ws.graph.ingest_graph(nodes.iter().map(String::as_str), edges.iter().map(String::as_str));
    ws.persist_graph(&report.added_node_ids, &report.added_edge_ids)?;
    Ok(envelope(ws.graph.version(), "report", report))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CorpusIngestBody {
    documents: Vec<Value>,
}

async fn ingest_corpus(State(s): State<Shared>, b: Result<Json<CorpusIngestBody>, JsonRejection>) -> ApiResult {
    let b = body(b)?;
    let docs = as_lines(&b.documents);
    let mut ws = s.write();
    let report = ws.corpus.ingest_corpus(docs.iter().map(String::as_str));
    ws.persist_documents(&report.added_doc_ids)?;
    let mut out = envelope(ws.graph.version(), "report", report);
    out.0["corpusVersion"] = json!(ws.corpus.version());
    Ok(out)
}

// --- corpus --------------------------------------------------------------

async fn mentions(State(s): State<Shared>, q: Result<Query<QueryMap>, QueryRejection>) -> ApiResult {
    let q = query_params(q)?;
    read_op(&s, "mentions_of", json!({"surface": q.get("surface"), "node": q.get("node")}), "mentions")
}

async fn context(State(s): State<Shared>, b: Result<Json<Value>, JsonRejection>) -> ApiResult {
    read_op(&s, "context", body(b)?, "context")
}

async fn document(State(s): State<Shared>, Path(id): Path<String>) -> ApiResult {
    let ws = s.read();
    let doc = ws.corpus.document(&id).ok_or_else(|| ApiError::not_found(format!("document {id:?} not found")))?;
    Ok(envelope(ws.graph.version(), "document", doc))
}

// --- seed sessions -------------------------------------------------------

async fn list_seed_sessions(State(s): State<Shared>) -> ApiResult {
    let ws = s.read();
    let list: Vec<_> = ws.sessions.seed_sessions().collect();
    Ok(envelope(ws.graph.version(), "sessions", list))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateSeedBody {
    entity_type: String,
}

async fn create_seed_session(State(s): State<Shared>, b: Result<Json<CreateSeedBody>, JsonRejection>) -> ApiResult {
    let b = body(b)?;
    let mut guard = s.write();
    let ws = &mut *guard;
    let session = ws.sessions.create_seed_session(&ws.graph, &b.entity_type, now_ms())?.clone();
    ws.persist_seed_session(&session.id)?;
    Ok(with_session_version(envelope(ws.graph.version(), "session", &session), session.version))
}

async fn seed_session(State(s): State<Shared>, Path(id): Path<String>) -> ApiResult {
    read_op(&s, "seed_session", json!({"session": id}), "session")
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SeedBody {
    node_id: String,
}

async fn add_seed(
    State(s): State<Shared>,
    Path(id): Path<String>,
    b: Result<Json<SeedBody>, JsonRejection>,
) -> ApiResult {
    let b = body(b)?;
    let mut guard = s.write();
    let ws = &mut *guard;
    let session = ws.sessions.add_seed(&ws.graph, &id, &b.node_id, now_ms())?.clone();
    ws.persist_seed_session(&id)?;
    Ok(with_session_version(envelope(ws.graph.version(), "session", &session), session.version))
}

async fn remove_seed(State(s): State<Shared>, Path((id, node)): Path<(String, String)>) -> ApiResult {
    let mut guard = s.write();
    let ws = &mut *guard;
    let session = ws.sessions.remove_seed(&ws.graph, &id, &node, now_ms())?.clone();
    ws.persist_seed_session(&id)?;
    Ok(with_session_version(envelope(ws.graph.version(), "session", &session), session.version))
}

async fn export_seeds(State(s): State<Shared>, Path(id): Path<String>) -> ApiResult {
    let ws = s.read();
    let file = ws.sessions.export_seeds(&ws.graph, &id)?;
    Ok(envelope(ws.graph.version(), "seedFile", file))
}

async fn import_seeds(State(s): State<Shared>, b: Result<Json<SeedFile>, JsonRejection>) -> ApiResult {
    let file = body(b)?;
    let mut guard = s.write();
    let ws = &mut *guard;
    let session = ws.sessions.import_seeds(&ws.graph, &file, now_ms())?.clone();
    ws.persist_seed_session(&session.id)?;
    Ok(with_session_version(envelope(ws.graph.version(), "session", &session), session.version))
}

async fn suggest(State(s): State<Shared>, q: Result<Query<QueryMap>, QueryRejection>) -> ApiResult {
    let q = query_params(q)?;
    let k = int_param(&q, "k")?.unwrap_or(3);
    read_op(&s, "suggest_expansion_types", json!({"k": k}), "suggestions")
}

// --- verification sessions ----------------------------------------------

async fn list_verification_sessions(State(s): State<Shared>) -> ApiResult {
    let ws = s.read();
    let list: Vec<_> = ws.sessions.verification_sessions().collect();
    Ok(envelope(ws.graph.version(), "sessions", list))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateVerifyBody {
    candidates: Vec<Value>,
}

async fn create_verification_session(
    State(s): State<Shared>,
    b: Result<Json<CreateVerifyBody>, JsonRejection>,
) -> ApiResult {
    let b = body(b)?;
    let lines = as_lines(&b.candidates);
    let mut guard = s.write();
    let ws = &mut *guard;
    let (session, rejected) =
        ws.sessions.create_verification_session(&ws.graph, &ws.corpus, lines.iter().map(String::as_str), now_ms());
    let session = session.clone();
    ws.persist_verification_session(&session.id)?;
    let mut out = with_session_version(envelope(ws.graph.version(), "session", &session), session.version);
    out.0["rejected"] = json!(rejected);
    Ok(out)
}

async fn verification_session(State(s): State<Shared>, Path(id): Path<String>) -> ApiResult {
    read_op(&s, "verification_session", json!({"session": id}), "session")
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DecisionBody {
    decision: Decision,
}

async fn set_decision(
    State(s): State<Shared>,
    Path((id, cid)): Path<(String, String)>,
    b: Result<Json<DecisionBody>, JsonRejection>,
) -> ApiResult {
    let b = body(b)?;
    let mut ws = s.write();
    let candidate = ws.sessions.set_decision(&id, &cid, b.decision, now_ms())?.clone();
    ws.persist_verification_session(&id)?;
    let version = ws.sessions.verification_session(&id)?.version;
    Ok(with_session_version(envelope(ws.graph.version(), "candidate", candidate), version))
}

async fn candidate_context(
    State(s): State<Shared>,
    Path((id, cid)): Path<(String, String)>,
    q: Result<Query<QueryMap>, QueryRejection>,
) -> ApiResult {
    let q = query_params(q)?;
    let mut params = json!({"session": id, "candidate": cid});
    if let Some(w) = int_param(&q, "window")? {
        params["window"] = json!(w);
    }
    if let Some(c) = int_param(&q, "cap")? {
        params["cap"] = json!(c);
    }
    read_op(&s, "candidate_context", params, "candidateContext")
}

async fn export_decisions(State(s): State<Shared>, Path(id): Path<String>) -> ApiResult {
    let ws = s.read();
    let file = ws.sessions.export_decisions(&id)?;
    Ok(envelope(ws.graph.version(), "decisionFile", file))
}

async fn import_decisions(State(s): State<Shared>, b: Result<Json<DecisionFile>, JsonRejection>) -> ApiResult {
    let file = body(b)?;
    let mut guard = s.write();
    let ws = &mut *guard;
    let (session, rejected) = ws.sessions.import_decisions(&ws.graph, &ws.corpus, &file, now_ms());
    let session = session.clone();
    ws.persist_verification_session(&session.id)?;
    let mut out = with_session_version(envelope(ws.graph.version(), "session", &session), session.version);
    out.0["rejected"] = json!(rejected);
    Ok(out)
}

async fn merge(State(s): State<Shared>, Path(id): Path<String>) -> ApiResult {
    let mut guard = s.write();
    let ws = &mut *guard;
    let result = ws.sessions.apply_merge(&mut ws.graph, &id, now_ms())?;
    ws.persist_graph(&result.node_ids, &result.edge_ids)?;
    ws.persist_verification_session(&id)?;
    let version = ws.sessions.verification_session(&id)?.version;
    Ok(with_session_version(envelope(ws.graph.version(), "mergeResult", result), version))
}

// --- history -------------------------------------------------------------

async fn list_history(State(s): State<Shared>) -> ApiResult {
    let ws = s.read();
    Ok(envelope(ws.graph.version(), "states", ws.history.list_states()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordBody {
    op_name: String,
    #[serde(default)]
    params: Value,
    #[serde(default)]
    view_hint: Value,
    #[serde(default)]
    parent: Option<String>,
}

async fn record_history(State(s): State<Shared>, b: Result<Json<RecordBody>, JsonRejection>) -> ApiResult {
    let b = body(b)?;
    let mut guard = s.write();
    let ws = &mut *guard;
    // Reject parameters the operation would refuse on replay.
    if let Err(OpError::BadParams(m)) = ops::dispatch(&b.op_name, &b.params, ws.snapshot()) {
        return Err(ApiError::bad_request(m));
    }
    let version = ws.graph.version();
    let state = ws
        .history
        .record_state(&b.op_name, b.params, b.view_hint, b.parent.as_deref(), now_ms(), version)?
        .clone();
    ws.persist_state(&state.id)?;
    Ok(envelope(version, "state", state))
}

async fn restore_history(State(s): State<Shared>, Path(id): Path<String>) -> ApiResult {
    let ws = s.read();
    let restored = ws.history.restore_state(&id, ws.snapshot())?;
    Ok(envelope(ws.graph.version(), "restored", restored))
}

// --- events --------------------------------------------------------------

async fn publish(State(s): State<Shared>, b: Result<Json<SelectionRequest>, JsonRejection>) -> ApiResult {
    let req = body(b)?;
    let event = s.events.publish(req);
    let version = s.read().graph.version();
    Ok(Json(json!({"graphVersion": version, "seq": event.seq, "event": event})))
}

#[derive(Deserialize)]
struct ScopeQuery {
    scope: String,
}

async fn subscribe(
    State(s): State<Shared>,
    q: Result<Query<ScopeQuery>, QueryRejection>,
) -> Result<Sse<impl futures::Stream<Item = Result<Event, Infallible>>>, ApiError> {
    let scope = q?.0.scope;
    // Subscribe before returning, so anything published after the
    // response headers arrive is delivered.
    let rx = s.events.subscribe(&scope);
    let shutdown = s.shutdown.clone();
    let stream = futures::stream::unfold((rx, shutdown), |(mut rx, mut shutdown)| async move {
        if *shutdown.borrow() {
            return None;
        }
        let next = tokio::select! {
            r = rx.recv() => r,
            _ = shutdown.changed() => return None,
        };
        match next {
            Ok(ev) => {
                let event = Event::default()
                    .event("selection")
                    .id(ev.seq.to_string())
                    .json_data(&ev)
                    .expect("events serialize");
                Some((Ok(event), (rx, shutdown)))
            }
            // A lagging subscriber is disconnected rather than shown a gap;
            // it resubscribes and dedupes by seq.
            Err(broadcast::error::RecvError::Lagged(_)) | Err(broadcast::error::RecvError::Closed) => None,
        }
    });
    Ok(Sse::new(stream).keep_alive(KeepAlive::default()))
}

// --- serving -------------------------------------------------------------

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("port {0} is already in use")]
    PortInUse(u16),
    #[error(transparent)]
    BadDataDir(#[from] StoreError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub async fn bind(addr: SocketAddr) -> Result<TcpListener, ServeError> {
    TcpListener::bind(addr).await.map_err(|e| match e.kind() {
        std::io::ErrorKind::AddrInUse => ServeError::PortInUse(addr.port()),
        _ => ServeError::Io(e),
    })
}

/// Serves until `shutdown` resolves, then closes event streams and lets
/// in-flight requests finish.
pub async fn serve(
    listener: TcpListener,
    ws: Workspace,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let (tx, rx) = watch::channel(false);
    let app = router(Arc::new(AppState::new(ws, rx)));
    axum::serve(listener, app)
        .with_graceful_shutdown(async move {
            shutdown.await;
            let _ = tx.send(true);
        })
        .await
}

/// A server running on a background task.
pub struct RunningServer {
    pub addr: SocketAddr,
    stop: Option<oneshot::Sender<()>>,
    task: tokio::task::JoinHandle<std::io::Result<()>>,
}

impl RunningServer {
    pub async fn start(listener: TcpListener, ws: Workspace) -> std::io::Result<Self> {
        let addr = listener.local_addr()?;
        let (stop, stopped) = oneshot::channel::<()>();
        let task = tokio::spawn(serve(listener, ws, async move {
            let _ = stopped.await;
        }));
        Ok(RunningServer { addr, stop: Some(stop), task })
    }

    pub fn url(&self, path: &str) -> String {
        format!("http://{}{}", self.addr, path)
    }

    pub async fn shutdown(mut self) -> std::io::Result<()> {
        if let Some(stop) = self.stop.take() {
            let _ = stop.send(());
        }
        self.task.await.map_err(std::io::Error::other)?
    }
}
