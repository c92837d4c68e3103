//! Overview and detail analytics: faceted (type-level) graph, label
//! distributions, per-relation degree profiles, capped neighborhoods and
//! the entity frequency used to rank expansion candidates.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::graph::{Edge, Node, PropertyGraph};

/// Node-link views stop being readable well before this many nodes.
pub const DEFAULT_NODE_CAP: usize = 500;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalyticsError {
    #[error("node {0:?} not found")]
    NotFound(String),
    #[error("node cap must be at least 1")]
    InvalidCap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuperNode {
    pub type_label: String,
    pub node_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuperEdge {
    pub src_type: String,
    pub rel_label: String,
    pub dst_type: String,
    pub edge_count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetedGraph {
    pub super_nodes: Vec<SuperNode>,
    pub super_edges: Vec<SuperEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistEntry {
    pub label: String,
    pub count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Distribution {
    pub entries: Vec<DistEntry>,
    pub total: usize,
}

impl Distribution {
    /// Most frequent first, ties by label.
    fn descending(counts: BTreeMap<String, usize>) -> Self {
        let mut entries: Vec<DistEntry> = counts
            .into_iter()
            .filter(|(_, c)| *c > 0)
            .map(|(label, count)| DistEntry { label, count })
            .collect();
        entries.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.label.cmp(&b.label)));
        let total = entries.iter().map(|e| e.count).sum();
        Distribution { entries, total }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelDegree {
    pub rel_label: String,
    pub in_count: usize,
    pub out_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeProfile {
    pub node_id: String,
    /// One entry per incident relation label, sorted by label.
    pub relations: Vec<RelDegree>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subgraph {
    /// Breadth-first order, ids ascending within each level.
    pub nodes: Vec<Node>,
    /// Edges among the included nodes, by id.
    pub edges: Vec<Edge>,
    pub truncated: bool,
    /// Included nodes with neighbors the cap kept out.
    pub frontier: Vec<String>,
}

pub fn faceted_graph(graph: &PropertyGraph) -> FacetedGraph {
    let super_nodes = graph
        .type_labels()
        .map(|t| SuperNode { type_label: t.to_string(), node_count: graph.nodes_of_type(t).count() })
        .filter(|s| s.node_count > 0)
        .collect();
    let mut edge_counts: BTreeMap<(&str, &str, &str), usize> = BTreeMap::new();
    for e in graph.edges() {
        let (Some(src), Some(dst)) = (graph.node(&e.src), graph.node(&e.dst)) else {
            continue;
        };
        *edge_counts
            .entry((src.type_label.as_str(), e.rel_label.as_str(), dst.type_label.as_str()))
            .or_default() += 1;
    }
    let super_edges = edge_counts
        .into_iter()
        .map(|((s, r, d), edge_count)| SuperEdge {
            src_type: s.to_string(),
            rel_label: r.to_string(),
            dst_type: d.to_string(),
            edge_count,
        })
        .collect();
    FacetedGraph { super_nodes, super_edges }
}

pub fn node_type_distribution(graph: &PropertyGraph) -> Distribution {
    Distribution::descending(
        graph
            .type_labels()
            .map(|t| (t.to_string(), graph.nodes_of_type(t).count()))
            .collect(),
    )
}

/// Relation label counts, optionally limited to edges with at least one
/// endpoint of `node_type`. Each edge counts once.
pub fn relation_type_distribution(graph: &PropertyGraph, node_type: Option<&str>) -> Distribution {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    match node_type {
        None => {
            for rel in graph.rel_labels() {
                counts.insert(rel.to_string(), graph.edges_of_rel(rel).count());
            }
        }
        Some(t) => {
            let mut seen: BTreeSet<&str> = BTreeSet::new();
            for node in graph.nodes_of_type(t) {
                for e in graph.out_edges(&node.id).chain(graph.in_edges(&node.id)) {
                    if seen.insert(e.id.as_str()) {
                        *counts.entry(e.rel_label.clone()).or_default() += 1;
                    }
                }
            }
        }
    }
    Distribution::descending(counts)
}

pub fn degree_profile(graph: &PropertyGraph, node_id: &str) -> Result<DegreeProfile, AnalyticsError> {
    if !graph.contains_node(node_id) {
        return Err(AnalyticsError::NotFound(node_id.to_string()));
    }
    let mut per_rel: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for e in graph.out_edges(node_id) {
        per_rel.entry(&e.rel_label).or_default().1 += 1;
    }
    for e in graph.in_edges(node_id) {
        per_rel.entry(&e.rel_label).or_default().0 += 1;
    }
    Ok(DegreeProfile {
        node_id: node_id.to_string(),
        relations: per_rel
            .into_iter()
            .map(|(rel, (in_count, out_count))| RelDegree {
                rel_label: rel.to_string(),
                in_count,
                out_count,
            })
            .collect(),
    })
}

fn rel_ok(edge: &Edge, rel_filter: Option<&str>) -> bool {
    rel_filter.is_none_or(|r| edge.rel_label == r)
}

/// Undirected neighbors of `id` through edges passing `rel_filter`.
fn neighbors<'g>(
    graph: &'g PropertyGraph,
    id: &str,
    rel_filter: Option<&'g str>,
) -> impl Iterator<Item = &'g str> + 'g {
    let out = graph
        .out_edges(id)
        .filter(move |e| rel_ok(e, rel_filter))
        .map(|e| e.dst.as_str());
    let inc = graph
        .in_edges(id)
        .filter(move |e| rel_ok(e, rel_filter))
        .map(|e| e.src.as_str());
    out.chain(inc)
}

/// Ball of radius `depth` around `node_id`, edges taken as undirected.
/// Nodes are visited level by level, ids ascending within a level, and the
/// first `node_cap` of that order are kept.
pub fn neighborhood(
    graph: &PropertyGraph,
    node_id: &str,
    depth: usize,
    rel_filter: Option<&str>,
    node_cap: usize,
) -> Result<Subgraph, AnalyticsError> {
    if node_cap == 0 {
        return Err(AnalyticsError::InvalidCap);
    }
    let start = graph
        .node(node_id)
        .ok_or_else(|| AnalyticsError::NotFound(node_id.to_string()))?;

    let mut dist: BTreeMap<&str, usize> = BTreeMap::new();
    dist.insert(start.id.as_str(), 0);
    let mut order: Vec<&str> = alloc::vec![start.id.as_str()];
    let mut level: Vec<&str> = order.clone();
    for d in 1..=depth {
        let mut next: BTreeSet<&str> = BTreeSet::new();
        for &u in &level {
            for v in neighbors(graph, u, rel_filter) {
                if !dist.contains_key(v) {
                    next.insert(v);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        for &v in &next {
            dist.insert(v, d);
        }
        order.extend(next.iter().copied());
        level = next.into_iter().collect();
    }

    let truncated = order.len() > node_cap;
    order.truncate(node_cap);
    let included: BTreeSet<&str> = order.iter().copied().collect();

    let frontier = if truncated {
        order
            .iter()
            .filter(|&&u| {
                dist[u] < depth && neighbors(graph, u, rel_filter).any(|v| !included.contains(v))
            })
            .map(|u| u.to_string())
            .collect()
    } else {
        Vec::new()
    };

    let mut edge_ids: BTreeSet<&str> = BTreeSet::new();
    for &u in &order {
        for e in graph.out_edges(u) {
            if rel_ok(e, rel_filter) && included.contains(e.dst.as_str()) {
                edge_ids.insert(e.id.as_str());
            }
        }
    }
    Ok(Subgraph {
        nodes: order.iter().filter_map(|id| graph.node(id)).cloned().collect(),
        edges: edge_ids.iter().filter_map(|id| graph.edge(id)).cloned().collect(),
        truncated,
        frontier,
    })
}

/// Total degree of a node; a self-loop contributes two.
pub fn total_degree(graph: &PropertyGraph, node_id: &str) -> usize {
    graph.out_degree(node_id) + graph.in_degree(node_id)
}

/// Degree plus linked corpus mentions for every node of `entity_type`,
/// lowest first (ties by node id). Zero-frequency nodes are listed too.
pub fn entity_frequency(graph: &PropertyGraph, entity_type: &str, corpus: &Corpus) -> Distribution {
    let mut entries: Vec<DistEntry> = graph
        .nodes_of_type(entity_type)
        .map(|n| DistEntry {
            label: n.id.clone(),
            count: total_degree(graph, &n.id) + corpus.mention_count(&n.id),
        })
        .collect();
    entries.sort_by(|a, b| a.count.cmp(&b.count).then_with(|| a.label.cmp(&b.label)));
    let total = entries.iter().map(|e| e.count).sum();
    Distribution { entries, total }
}
