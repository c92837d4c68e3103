//! In-memory property graph: typed nodes, directed typed edges, and the
//! type/relation/adjacency indexes every analytic reads from.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::Attrs;

/// Attribute value. Attributes are flat: nested objects and arrays are
/// rejected at ingestion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Bool(bool),
    Number(f64),
    String(String),
}

impl From<&str> for Scalar {
    fn from(s: &str) -> Self {
        Scalar::String(s.to_string())
    }
}

impl From<String> for Scalar {
    fn from(s: String) -> Self {
        Scalar::String(s)
    }
}

impl From<f64> for Scalar {
    fn from(v: f64) -> Self {
        Scalar::Number(v)
    }
}

impl From<bool> for Scalar {
    fn from(v: bool) -> Self {
        Scalar::Bool(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    #[serde(rename = "type")]
    pub type_label: String,
    pub name: String,
    #[serde(default)]
    pub attrs: Attrs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub src: String,
    pub dst: String,
    #[serde(rename = "rel")]
    pub rel_label: String,
    #[serde(default)]
    pub attrs: Attrs,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("type label must be non-empty")]
    EmptyTypeLabel,
    #[error("relation label must be non-empty")]
    EmptyRelLabel,
    #[error("unknown edge endpoint {0:?}")]
    UnknownEndpoint(String),
    #[error("{0:?} not found")]
    NotFound(String),
}

/// One node record of the JSON-lines ingest format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(rename = "type")]
    pub type_label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attrs: Option<Attrs>,
}

/// One edge record of the JSON-lines ingest format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub src: String,
    pub dst: String,
    pub rel: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attrs: Option<Attrs>,
}

impl From<&Node> for NodeRecord {
    fn from(n: &Node) -> Self {
        NodeRecord {
            id: Some(n.id.clone()),
            type_label: n.type_label.clone(),
            name: Some(n.name.clone()),
            attrs: if n.attrs.is_empty() { None } else { Some(n.attrs.clone()) },
        }
    }
}

impl From<&Edge> for EdgeRecord {
    fn from(e: &Edge) -> Self {
        EdgeRecord {
            id: Some(e.id.clone()),
            src: e.src.clone(),
            dst: e.dst.clone(),
            rel: e.rel_label.clone(),
            attrs: if e.attrs.is_empty() { None } else { Some(e.attrs.clone()) },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordKind {
    Node,
    Edge,
    Document,
    Candidate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub kind: RecordKind,
    /// 1-based line number within its input stream.
    pub ordinal: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub nodes_added: usize,
    pub edges_added: usize,
    pub rejected: Vec<Rejection>,
    /// Ids of the accepted records, in input order.
    #[serde(skip)]
    pub added_node_ids: Vec<String>,
    #[serde(skip)]
    pub added_edge_ids: Vec<String>,
}

#[derive(Debug, Clone, Default)]
pub struct PropertyGraph {
    nodes: BTreeMap<String, Node>,
    edges: BTreeMap<String, Edge>,
    by_type: BTreeMap<String, BTreeSet<String>>,
    by_rel: BTreeMap<String, BTreeSet<String>>,
    out_adj: BTreeMap<String, Vec<String>>,
    in_adj: BTreeMap<String, Vec<String>>,
    next_node: u64,
    next_edge: u64,
    version: u64,
}

impl PropertyGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Bumped by every successful mutation.
    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn counts(&self) -> (usize, usize) {
        (self.nodes.len(), self.edges.len())
    }

    pub fn add_node(
        &mut self,
        type_label: &str,
        name: Option<&str>,
        attrs: Attrs,
        id: Option<&str>,
    ) -> Result<String, GraphError> {
        if type_label.is_empty() {
            return Err(GraphError::EmptyTypeLabel);
        }
        let id = match id {
            Some(id) if self.nodes.contains_key(id) => {
                return Err(GraphError::DuplicateId(id.to_string()))
            }
            Some(id) => id.to_string(),
            None => self.fresh_node_id(),
        };
        let node = Node {
            id: id.clone(),
            type_label: type_label.to_string(),
            name: name.map(str::to_string).unwrap_or_else(|| id.clone()),
            attrs,
        };
        self.by_type
            .entry(node.type_label.clone())
            .or_default()
            .insert(id.clone());
        self.nodes.insert(id.clone(), node);
        self.version += 1;
        Ok(id)
    }

    pub fn add_edge(
        &mut self,
        src: &str,
        dst: &str,
        rel_label: &str,
        attrs: Attrs,
        id: Option<&str>,
    ) -> Result<String, GraphError> {
        if rel_label.is_empty() {
            return Err(GraphError::EmptyRelLabel);
        }
        for endpoint in [src, dst] {
            if !self.nodes.contains_key(endpoint) {
                return Err(GraphError::UnknownEndpoint(endpoint.to_string()));
            }
        }
        let id = match id {
            Some(id) if self.edges.contains_key(id) => {
                return Err(GraphError::DuplicateId(id.to_string()))
            }
            Some(id) => id.to_string(),
            None => self.fresh_edge_id(),
        };
        self.out_adj.entry(src.to_string()).or_default().push(id.clone());
        self.in_adj.entry(dst.to_string()).or_default().push(id.clone());
        self.by_rel
            .entry(rel_label.to_string())
            .or_default()
            .insert(id.clone());
        self.edges.insert(
            id.clone(),
            Edge {
                id: id.clone(),
                src: src.to_string(),
                dst: dst.to_string(),
                rel_label: rel_label.to_string(),
                attrs,
            },
        );
        self.version += 1;
        Ok(id)
    }

    fn fresh_node_id(&mut self) -> String {
        loop {
            self.next_node += 1;
            let id = format!("n{}", self.next_node);
            if !self.nodes.contains_key(&id) {
                return id;
            }
        }
    }

    fn fresh_edge_id(&mut self) -> String {
        loop {
            self.next_edge += 1;
            let id = format!("e{}", self.next_edge);
            if !self.edges.contains_key(&id) {
                return id;
            }
        }
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.get(id)
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.get(id)
    }

    pub fn get_node(&self, id: &str) -> Result<&Node, GraphError> {
        self.node(id).ok_or_else(|| GraphError::NotFound(id.to_string()))
    }

    pub fn get_edge(&self, id: &str) -> Result<&Edge, GraphError> {
        self.edge(id).ok_or_else(|| GraphError::NotFound(id.to_string()))
    }

    pub fn contains_node(&self, id: &str) -> bool {
        self.nodes.contains_key(id)
    }

    /// All nodes in id order.
    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.values()
    }

    /// All edges in id order.
    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.values()
    }

    pub fn type_labels(&self) -> impl Iterator<Item = &str> {
        self.by_type.keys().map(String::as_str)
    }

    pub fn rel_labels(&self) -> impl Iterator<Item = &str> {
        self.by_rel.keys().map(String::as_str)
    }

    pub fn has_type(&self, type_label: &str) -> bool {
        self.by_type.contains_key(type_label)
    }

    /// Nodes of one type, in id order.
    pub fn nodes_of_type<'a>(&'a self, type_label: &str) -> impl Iterator<Item = &'a Node> + 'a {
        self.by_type
            .get(type_label)
            .into_iter()
            .flatten()
            .map(move |id| &self.nodes[id])
    }

    pub fn edges_of_rel<'a>(&'a self, rel_label: &str) -> impl Iterator<Item = &'a Edge> + 'a {
        self.by_rel
            .get(rel_label)
            .into_iter()
            .flatten()
            .map(move |id| &self.edges[id])
    }

    /// Outgoing edges of a node, in insertion order.
    pub fn out_edges<'a>(&'a self, node_id: &str) -> impl Iterator<Item = &'a Edge> + 'a {
        self.out_adj
            .get(node_id)
            .into_iter()
            .flatten()
            .map(move |id| &self.edges[id])
    }

    /// Incoming edges of a node, in insertion order.
    pub fn in_edges<'a>(&'a self, node_id: &str) -> impl Iterator<Item = &'a Edge> + 'a {
        self.in_adj
            .get(node_id)
            .into_iter()
            .flatten()
            .map(move |id| &self.edges[id])
    }

    pub fn out_degree(&self, node_id: &str) -> usize {
        self.out_adj.get(node_id).map_or(0, Vec::len)
    }

    pub fn in_degree(&self, node_id: &str) -> usize {
        self.in_adj.get(node_id).map_or(0, Vec::len)
    }

    /// Applies JSON-lines node and edge records. Each record is applied on
    /// its own; blank lines are skipped and do not consume an ordinal slot
    /// in the report (ordinals are still line numbers).
    pub fn ingest_graph<'a, N, E>(&mut self, node_lines: N, edge_lines: E) -> IngestReport
    where
        N: IntoIterator<Item = &'a str>,
        E: IntoIterator<Item = &'a str>,
    {
        let mut report = IngestReport::default();
        for (idx, line) in node_lines.into_iter().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let result = serde_json::from_str::<NodeRecord>(line)
                .map_err(|e| format!("malformed node record: {e}"))
                .and_then(|rec| self.apply_node_record(rec).map_err(|e| e.to_string()));
            match result {
                Ok(id) => {
                    report.nodes_added += 1;
                    report.added_node_ids.push(id);
                }
                Err(reason) => report.rejected.push(Rejection {
                    kind: RecordKind::Node,
                    ordinal: idx + 1,
                    reason,
                }),
            }
        }
        for (idx, line) in edge_lines.into_iter().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let result = serde_json::from_str::<EdgeRecord>(line)
                .map_err(|e| format!("malformed edge record: {e}"))
                .and_then(|rec| self.apply_edge_record(rec).map_err(|e| e.to_string()));
            match result {
                Ok(id) => {
                    report.edges_added += 1;
                    report.added_edge_ids.push(id);
                }
                Err(reason) => report.rejected.push(Rejection {
                    kind: RecordKind::Edge,
                    ordinal: idx + 1,
                    reason,
                }),
            }
        }
        report
    }

    pub fn apply_node_record(&mut self, rec: NodeRecord) -> Result<String, GraphError> {
        self.add_node(
            &rec.type_label,
            rec.name.as_deref(),
            rec.attrs.unwrap_or_default(),
            rec.id.as_deref(),
        )
    }

    pub fn apply_edge_record(&mut self, rec: EdgeRecord) -> Result<String, GraphError> {
        self.add_edge(
            &rec.src,
            &rec.dst,
            &rec.rel,
            rec.attrs.unwrap_or_default(),
            rec.id.as_deref(),
        )
    }

    /// Full-scan check of referential integrity and index consistency.
    pub fn verify_integrity(&self) -> Result<(), String> {
        for edge in self.edges.values() {
            for endpoint in [&edge.src, &edge.dst] {
                if !self.nodes.contains_key(endpoint) {
                    return Err(format!("edge {} has dangling endpoint {}", edge.id, endpoint));
                }
            }
        }
        let mut by_type: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for node in self.nodes.values() {
            if node.type_label.is_empty() {
                return Err(format!("node {} has an empty type label", node.id));
            }
            by_type
                .entry(node.type_label.clone())
                .or_default()
                .insert(node.id.clone());
        }
        if by_type != self.by_type {
            return Err("type index out of sync".to_string());
        }
        let mut by_rel: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        let mut out_adj: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        let mut in_adj: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for edge in self.edges.values() {
            by_rel
                .entry(edge.rel_label.clone())
                .or_default()
                .insert(edge.id.clone());
            out_adj.entry(edge.src.clone()).or_default().insert(edge.id.clone());
            in_adj.entry(edge.dst.clone()).or_default().insert(edge.id.clone());
        }
        if by_rel != self.by_rel {
            return Err("relation index out of sync".to_string());
        }
        let as_sets = |adj: &BTreeMap<String, Vec<String>>| -> Option<BTreeMap<String, BTreeSet<String>>> {
            let mut out = BTreeMap::new();
            for (k, ids) in adj {
                let set: BTreeSet<String> = ids.iter().cloned().collect();
                if set.len() != ids.len() {
                    return None;
                }
                out.insert(k.clone(), set);
            }
            Some(out)
        };
        if as_sets(&self.out_adj) != Some(out_adj) {
            return Err("out-adjacency out of sync".to_string());
        }
        if as_sets(&self.in_adj) != Some(in_adj) {
            return Err("in-adjacency out of sync".to_string());
        }
        Ok(())
    }
}
