//! Named read operations with JSON parameters. This is the registry the
//! exploration history replays against, and the single place where a
//! parameter object is turned into a typed call.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::analytics::{self, AnalyticsError, DEFAULT_NODE_CAP};
use crate::corpus::{Corpus, CorpusError, MentionKey};
use crate::graph::{GraphError, PropertyGraph};
use crate::query::{self, QueryError};
use crate::workflows::{self, SessionStore, WorkflowError};

/// Characters of context shown on each side of a highlighted span unless
/// the caller asks otherwise.
pub const DEFAULT_WINDOW: usize = 60;

/// Every operation that can be recorded in the history and replayed.
pub const REGISTERED_OPS: [&str; 15] = [
    "counts",
    "faceted_graph",
    "node_type_distribution",
    "relation_type_distribution",
    "get_node",
    "degree_profile",
    "neighborhood",
    "entity_frequency",
    "query",
    "mentions_of",
    "context",
    "suggest_expansion_types",
    "seed_session",
    "verification_session",
    "candidate_context",
];

pub fn is_registered(op: &str) -> bool {
    REGISTERED_OPS.contains(&op)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OpError {
    #[error("unknown operation {0:?}")]
    UnknownOperation(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Workflow(#[from] WorkflowError),
}

/// Borrowed view of everything a read operation may look at.
#[derive(Clone, Copy)]
pub struct Snapshot<'a> {
    pub graph: &'a PropertyGraph,
    pub corpus: &'a Corpus,
    pub sessions: &'a SessionStore,
    pub default_cap: usize,
}

impl<'a> Snapshot<'a> {
    pub fn new(graph: &'a PropertyGraph, corpus: &'a Corpus, sessions: &'a SessionStore) -> Self {
        Snapshot { graph, corpus, sessions, default_cap: DEFAULT_NODE_CAP }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub node_count: usize,
    pub edge_count: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoParams {}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RelationDistParams {
    #[serde(default, alias = "type")]
    pub node_type: Option<String>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct NodeParams {
    pub node_id: String,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct NeighborhoodParams {
    pub node_id: String,
    #[serde(default = "one")]
    pub depth: usize,
    #[serde(default)]
    pub rel: Option<String>,
    #[serde(default)]
    pub cap: Option<usize>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TypeParams {
    pub entity_type: String,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct QueryParams {
    pub query: String,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MentionParams {
    #[serde(default)]
    pub surface: Option<String>,
    #[serde(default)]
    pub node: Option<String>,
}

impl MentionParams {
    pub fn key(&self) -> Result<MentionKey, OpError> {
        match (&self.surface, &self.node) {
            (Some(s), None) => Ok(MentionKey::Surface(s.clone())),
            (None, Some(n)) => Ok(MentionKey::Node(n.clone())),
            _ => Err(OpError::BadParams("give exactly one of surface or node".to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
pub struct SpanRange {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ContextParams {
    pub doc_id: String,
    pub spans: Vec<SpanRange>,
    #[serde(default = "default_window")]
    pub window: usize,
}

fn default_window() -> usize {
    DEFAULT_WINDOW
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SuggestParams {
    pub k: usize,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SessionParams {
    pub session: String,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateParams {
    pub session: String,
    pub candidate: String,
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(default)]
    pub cap: Option<usize>,
}

fn parse<T: DeserializeOwned>(params: &Value) -> Result<T, OpError> {
    // An absent parameter object means "no parameters".
    let params = if params.is_null() { &Value::Object(Default::default()) } else { params };
    T::deserialize(params).map_err(|e| OpError::BadParams(e.to_string()))
}

fn to_json<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("result types serialize to JSON")
}

/// Runs a registered operation. The returned JSON is exactly the
/// serialization of the typed result.
pub fn dispatch(op: &str, params: &Value, snap: Snapshot<'_>) -> Result<Value, OpError> {
    let Snapshot { graph, corpus, sessions, default_cap } = snap;
    match op {
        "counts" => {
            parse::<NoParams>(params)?;
            let (node_count, edge_count) = graph.counts();
            Ok(to_json(&Counts { node_count, edge_count }))
        }
        "faceted_graph" => {
            parse::<NoParams>(params)?;
            Ok(to_json(&analytics::faceted_graph(graph)))
        }
        "node_type_distribution" => {
            parse::<NoParams>(params)?;
            Ok(to_json(&analytics::node_type_distribution(graph)))
        }
        "relation_type_distribution" => {
            let p: RelationDistParams = parse(params)?;
            Ok(to_json(&analytics::relation_type_distribution(graph, p.node_type.as_deref())))
        }
        "get_node" => {
            let p: NodeParams = parse(params)?;
            Ok(to_json(graph.get_node(&p.node_id)?))
        }
        "degree_profile" => {
            let p: NodeParams = parse(params)?;
            Ok(to_json(&analytics::degree_profile(graph, &p.node_id)?))
        }
        "neighborhood" => {
            let p: NeighborhoodParams = parse(params)?;
            let cap = p.cap.unwrap_or(default_cap);
            Ok(to_json(&analytics::neighborhood(graph, &p.node_id, p.depth, p.rel.as_deref(), cap)?))
        }
        "entity_frequency" => {
            let p: TypeParams = parse(params)?;
            Ok(to_json(&analytics::entity_frequency(graph, &p.entity_type, corpus)))
        }
        "query" => {
            let p: QueryParams = parse(params)?;
            Ok(to_json(&query::run(&p.query, graph)?))
        }
        "mentions_of" => {
            let p: MentionParams = parse(params)?;
            Ok(to_json(&corpus.mentions_of(&p.key()?)))
        }
        "context" => {
            let p: ContextParams = parse(params)?;
            let spans: Vec<(usize, usize)> = p.spans.iter().map(|s| (s.start, s.end)).collect();
            Ok(to_json(&corpus.context(&p.doc_id, &spans, p.window)?))
        }
        "suggest_expansion_types" => {
            let p: SuggestParams = parse(params)?;
            Ok(to_json(&workflows::suggest_expansion_types(graph, corpus, p.k)?))
        }
        "seed_session" => {
            let p: SessionParams = parse(params)?;
            Ok(to_json(sessions.seed_session(&p.session)?))
        }
        "verification_session" => {
            let p: SessionParams = parse(params)?;
            Ok(to_json(sessions.verification_session(&p.session)?))
        }
        "candidate_context" => {
            let p: CandidateParams = parse(params)?;
            let cap = p.cap.unwrap_or(default_cap);
            Ok(to_json(&sessions.candidate_context(graph, corpus, &p.session, &p.candidate, p.window, cap)?))
        }
        other => Err(OpError::UnknownOperation(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Attrs;
    use serde_json::json;

    fn graph() -> PropertyGraph {
        let mut g = PropertyGraph::new();
        g.add_node("A", None, Attrs::new(), Some("a")).unwrap();
        g.add_node("B", None, Attrs::new(), Some("b")).unwrap();
        g.add_edge("a", "b", "r", Attrs::new(), None).unwrap();
        g
    }

    #[test]
    fn dispatch_matches_direct_calls() {
        let g = graph();
        let c = Corpus::new();
        let s = SessionStore::new();
        let snap = Snapshot::new(&g, &c, &s);
        assert_eq!(
            dispatch("faceted_graph", &json!({}), snap).unwrap(),
            serde_json::to_value(analytics::faceted_graph(&g)).unwrap()
        );
        assert_eq!(
            dispatch("neighborhood", &json!({"node_id": "a"}), snap).unwrap(),
            serde_json::to_value(analytics::neighborhood(&g, "a", 1, None, DEFAULT_NODE_CAP).unwrap()).unwrap()
        );
        assert_eq!(dispatch("counts", &Value::Null, snap).unwrap(), json!({"node_count": 2, "edge_count": 1}));
        assert_eq!(
            dispatch("relation_type_distribution", &json!({"type": "A"}), snap).unwrap(),
            json!({"entries": [{"label": "r", "count": 1}], "total": 1})
        );
    }

    #[test]
    fn dispatch_errors() {
        let g = graph();
        let c = Corpus::new();
        let s = SessionStore::new();
        let snap = Snapshot::new(&g, &c, &s);
        assert_eq!(
            dispatch("frobnicate", &json!({}), snap),
            Err(OpError::UnknownOperation("frobnicate".into()))
        );
        assert!(matches!(dispatch("faceted_graph", &json!({"x": 1}), snap), Err(OpError::BadParams(_))));
        assert!(matches!(dispatch("degree_profile", &json!({"node_id": "zz"}), snap), Err(OpError::Analytics(_))));
        assert!(matches!(dispatch("query", &json!({"query": "MATCH ("}), snap), Err(OpError::Query(_))));
        assert!(matches!(dispatch("mentions_of", &json!({}), snap), Err(OpError::BadParams(_))));
        for op in REGISTERED_OPS {
            assert!(is_registered(op));
        }
    }
}
