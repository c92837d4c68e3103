//! Exploration history. A state stores the operation and its parameters,
//! never the result: restoring re-runs the operation against the current
//! data, and the graph version recorded alongside lets the client notice
//! when a result may have drifted.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::ops::{self, OpError, Snapshot};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplorationState {
    pub id: String,
    pub timestamp_ms: u64,
    pub op_name: String,
    pub params: Value,
    /// Client view configuration; stored and returned untouched.
    pub view_hint: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    pub graph_version: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Restored {
    pub state: ExplorationState,
    pub result: Value,
    /// Graph version the result was computed against.
    pub graph_version: u64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HistoryError {
    #[error("unknown operation {0:?}")]
    UnknownOperation(String),
    #[error("unknown parent state {0:?}")]
    UnknownParent(String),
    #[error("state {0:?} not found")]
    NotFound(String),
    #[error("duplicate state id {0:?}")]
    DuplicateId(String),
    #[error(transparent)]
    Replay(#[from] OpError),
}

/// Append-only list of states; ids are never reused.
#[derive(Debug, Clone, Default)]
pub struct History {
    states: Vec<ExplorationState>,
    next: u64,
}

impl History {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&ExplorationState> {
        self.states.iter().find(|s| s.id == id)
    }

    pub fn record_state(
        &mut self,
        op_name: &str,
        params: Value,
        view_hint: Value,
        parent: Option<&str>,
        timestamp_ms: u64,
        graph_version: u64,
    ) -> Result<&ExplorationState, HistoryError> {
        if !ops::is_registered(op_name) {
            return Err(HistoryError::UnknownOperation(op_name.to_string()));
        }
        if let Some(p) = parent {
            if self.get(p).is_none() {
                return Err(HistoryError::UnknownParent(p.to_string()));
            }
        }
        self.next += 1;
        self.states.push(ExplorationState {
            id: format!("state-{}", self.next),
            timestamp_ms,
            op_name: op_name.to_string(),
            params,
            view_hint,
            parent: parent.map(str::to_string),
            graph_version,
        });
        Ok(self.states.last().expect("just pushed"))
    }

    /// Re-appends a persisted state, keeping its id.
    pub fn load_state(&mut self, state: ExplorationState) -> Result<(), HistoryError> {
        if !ops::is_registered(&state.op_name) {
            return Err(HistoryError::UnknownOperation(state.op_name));
        }
        if self.get(&state.id).is_some() {
            return Err(HistoryError::DuplicateId(state.id));
        }
        if let Some(p) = &state.parent {
            if self.get(p).is_none() {
                return Err(HistoryError::UnknownParent(p.clone()));
            }
        }
        if let Some(n) = state.id.strip_prefix("state-").and_then(|n| n.parse::<u64>().ok()) {
            self.next = self.next.max(n);
        }
        self.states.push(state);
        Ok(())
    }

    /// States in timestamp order; equal timestamps keep recording order.
    pub fn list_states(&self) -> Vec<&ExplorationState> {
        let mut out: Vec<&ExplorationState> = self.states.iter().collect();
        out.sort_by_key(|s| s.timestamp_ms);
        out
    }

    pub fn restore_state(&self, id: &str, snap: Snapshot<'_>) -> Result<Restored, HistoryError> {
        let state = self.get(id).ok_or_else(|| HistoryError::NotFound(id.to_string()))?;
        let result = ops::dispatch(&state.op_name, &state.params, snap)?;
        Ok(Restored { state: state.clone(), result, graph_version: snap.graph.version() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{analytics, Attrs, Corpus, PropertyGraph, SessionStore};
    use serde_json::json;

    #[test]
    fn record_list_restore() {
        let mut g = PropertyGraph::new();
        g.add_node("A", None, Attrs::new(), Some("a")).unwrap();
        g.add_node("A", None, Attrs::new(), Some("b")).unwrap();
        g.add_edge("a", "b", "r", Attrs::new(), None).unwrap();
        let c = Corpus::new();
        let s = SessionStore::new();
        let mut h = History::new();

        let root = h
            .record_state("faceted_graph", json!({}), json!({"pane": 1}), None, 10, g.version())
            .unwrap()
            .id
            .clone();
        assert_eq!(h.list_states().len(), 1);
        let child = h
            .record_state("neighborhood", json!({"node_id": "a", "depth": 1}), Value::Null, Some(&root), 20, g.version())
            .unwrap()
            .clone();
        assert_eq!(child.parent.as_deref(), Some(root.as_str()));
        assert_eq!(
            h.record_state("frobnicate", json!({}), Value::Null, None, 30, 0).unwrap_err(),
            HistoryError::UnknownOperation("frobnicate".into())
        );
        assert_eq!(
            h.record_state("counts", json!({}), Value::Null, Some("state-99"), 30, 0).unwrap_err(),
            HistoryError::UnknownParent("state-99".into())
        );

        let snap = Snapshot::new(&g, &c, &s);
        let restored = h.restore_state(&child.id, snap).unwrap();
        let direct = analytics::neighborhood(&g, "a", 1, None, 500).unwrap();
        assert_eq!(
            serde_json::to_string(&restored.result).unwrap(),
            serde_json::to_string(&serde_json::to_value(&direct).unwrap()).unwrap()
        );
        assert_eq!(restored.state.view_hint, Value::Null);
        assert_eq!(h.restore_state(&root, snap).unwrap().state.view_hint, json!({"pane": 1}));
        assert!(matches!(h.restore_state("nope", snap), Err(HistoryError::NotFound(_))));

        // a later mutation changes the replayed result, not the state
        g.add_node("A", None, Attrs::new(), Some("c")).unwrap();
        g.add_edge("a", "c", "r", Attrs::new(), None).unwrap();
        let snap = Snapshot::new(&g, &c, &s);
        let again = h.restore_state(&child.id, snap).unwrap();
        assert_ne!(again.result, restored.result);
        assert!(again.graph_version > again.state.graph_version);
    }

    #[test]
    fn replay_error_surfaces_operation_error() {
        let g = PropertyGraph::new();
        let c = Corpus::new();
        let s = SessionStore::new();
        let mut h = History::new();
        let id = h
            .record_state("degree_profile", json!({"node_id": "gone"}), Value::Null, None, 1, 0)
            .unwrap()
            .id
            .clone();
        assert!(matches!(
            h.restore_state(&id, Snapshot::new(&g, &c, &s)),
            Err(HistoryError::Replay(OpError::Analytics(_)))
        ));
    }

    #[test]
    fn ids_continue_after_load() {
        let mut h = History::new();
        h.load_state(ExplorationState {
            id: "state-7".into(),
            timestamp_ms: 1,
            op_name: "counts".into(),
            params: json!({}),
            view_hint: Value::Null,
            parent: None,
            graph_version: 0,
        })
        .unwrap();
        let id = h.record_state("counts", json!({}), Value::Null, Some("state-7"), 2, 0).unwrap().id.clone();
        assert_eq!(id, "state-8");
    }
}
