//! Selection events shared between coordinated views.
//!
//! Each scope has its own gapless sequence. Numbering and sending happen
//! under one short lock, so every subscriber sees a scope's events in seq
//! order; the broadcast send never waits on a slow subscriber.

use std::collections::HashMap;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use tokio::sync::broadcast;

/// Buffered events per scope before a slow subscriber lags.
pub const SCOPE_BUFFER: usize = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "id", rename_all = "lowercase")]
pub enum Target {
    Node(String),
    Type(String),
    Relation(String),
    Candidate(String),
    Document(String),
}

/// What a view sends; the hub assigns the sequence number.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionRequest {
    pub session_scope: String,
    pub target: Target,
    pub origin_view: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionEvent {
    pub session_scope: String,
    pub target: Target,
    pub origin_view: String,
    pub seq: u64,
}

struct Scope {
    last_seq: u64,
    tx: broadcast::Sender<SelectionEvent>,
}

#[derive(Default)]
pub struct EventHub {
    scopes: Mutex<HashMap<String, Scope>>,
}

impl EventHub {
    pub fn new() -> Self {
        Self::default()
    }

    fn with_scope<R>(&self, scope: &str, f: impl FnOnce(&mut Scope) -> R) -> R {
        let mut scopes = self.scopes.lock().unwrap_or_else(|p| p.into_inner());
        let entry = scopes.entry(scope.to_string()).or_insert_with(|| Scope {
            last_seq: 0,
            tx: broadcast::channel(SCOPE_BUFFER).0,
        });
        f(entry)
    }

    pub fn publish(&self, req: SelectionRequest) -> SelectionEvent {
        let scope = req.session_scope.clone();
        self.with_scope(&scope, |s| {
            s.last_seq += 1;
            let event = SelectionEvent {
                session_scope: req.session_scope,
                target: req.target,
                origin_view: req.origin_view,
                seq: s.last_seq,
            };
            // no subscribers is fine
            let _ = s.tx.send(event.clone());
            event
        })
    }

    /// Receives every event published to `scope` from now on.
    pub fn subscribe(&self, scope: &str) -> broadcast::Receiver<SelectionEvent> {
        self.with_scope(scope, |s| s.tx.subscribe())
    }

    pub fn last_seq(&self, scope: &str) -> u64 {
        self.with_scope(scope, |s| s.last_seq)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(scope: &str, node: &str) -> SelectionRequest {
        SelectionRequest {
            session_scope: scope.into(),
            target: Target::Node(node.into()),
            origin_view: "faceted".into(),
        }
    }

    #[test]
    fn seq_is_per_scope_and_late_subscribers_miss_earlier_events() {
        let hub = EventHub::new();
        assert_eq!(hub.publish(req("a", "n1")).seq, 1);
        let mut rx = hub.subscribe("a");
        assert_eq!(hub.publish(req("b", "n1")).seq, 1);
        assert_eq!(hub.publish(req("a", "n2")).seq, 2);
        let got = rx.try_recv().unwrap();
        assert_eq!((got.seq, got.target), (2, Target::Node("n2".into())));
        assert!(rx.try_recv().is_err());
    }

    #[test]
    fn target_wire_shape() {
        let v = serde_json::to_value(Target::Relation("requires_skill".into())).unwrap();
        assert_eq!(v, serde_json::json!({"kind": "relation", "id": "requires_skill"}));
    }
}
