//! Expert-in-the-loop curation sessions.
//!
//! Seed sessions collect example entities of one type for set expansion
//! and export them as a seed file. Verification sessions hold alignment
//! candidates extracted from the corpus; each candidate carries an
//! insert/ignore/defer decision that stays revisable until the session is
//! merged into the graph. A merge either applies every insert or nothing.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::analytics::{self, AnalyticsError, Subgraph};
use crate::corpus::{Corpus, CorpusError, HighlightedContext};
use crate::graph::{PropertyGraph, RecordKind, Rejection, Scalar};
use crate::Attrs;

/// Attribute stamped on every node and edge created by a merge.
pub const MERGE_SOURCE: &str = "corpus-alignment";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WorkflowError {
    #[error("unknown entity type {0:?}")]
    UnknownType(String),
    #[error("unknown session {0:?}")]
    UnknownSession(String),
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("node {node:?} has type {found:?}, session expects {expected:?}")]
    TypeMismatch { node: String, expected: String, found: String },
    #[error("unknown candidate {0:?}")]
    UnknownCandidate(String),
    #[error("session {0:?} is merged; decisions are frozen")]
    SessionMerged(String),
    #[error("candidate {0:?} has no proposed type; cannot insert")]
    MissingProposal(String),
    #[error("session {0:?} was already merged")]
    AlreadyMerged(String),
    #[error("candidate {candidate:?} proposes an edge to unknown node {target:?}")]
    UnknownEdgeTarget { candidate: String, target: String },
    #[error("merge would reuse existing node id {0:?}")]
    IdCollision(String),
    #[error("k must be at least 1")]
    InvalidK,
    #[error("invalid seed file: {0}")]
    InvalidSeedFile(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSession {
    pub id: String,
    pub entity_type: String,
    /// Insertion-ordered, no duplicates.
    pub seeds: Vec<String>,
    pub created_ms: u64,
    pub updated_ms: u64,
    pub version: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedEntry {
    pub node_id: String,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedFile {
    pub entity_type: String,
    pub seeds: Vec<SeedEntry>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    #[default]
    Pending,
    Insert,
    Ignore,
    Defer,
}

impl Decision {
    pub const ALL: [Decision; 4] = [Decision::Pending, Decision::Insert, Decision::Ignore, Decision::Defer];

    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Pending => "pending",
            Decision::Insert => "insert",
            Decision::Ignore => "ignore",
            Decision::Defer => "defer",
        }
    }
}

impl core::str::FromStr for Decision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Decision::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| format!("unknown decision {s:?}; expected pending, insert, ignore or defer"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeDir {
    /// New node is the source.
    Out,
    /// New node is the target.
    In,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProposedEdge {
    pub rel: String,
    pub target: String,
    pub dir: EdgeDir,
}

/// One evidence span, in code points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub doc: String,
    pub start: usize,
    pub end: usize,
}

/// Candidate record as read from JSON lines.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub id: String,
    pub surface: String,
    #[serde(default)]
    pub evidence: Vec<Evidence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph_node: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proposed_type: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proposed_edges: Option<Vec<ProposedEdge>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentCandidate {
    pub id: String,
    pub surface: String,
    pub evidence: Vec<Evidence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph_node: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proposed_type: Option<String>,
    #[serde(default)]
    pub proposed_edges: Vec<ProposedEdge>,
    #[serde(default)]
    pub decision: Decision,
}

impl AlignmentCandidate {
    /// Evidence spans grouped per document, documents in first-seen order.
    pub fn evidence_docs(&self) -> Vec<(&str, Vec<(usize, usize)>)> {
        let mut grouped: Vec<(&str, Vec<(usize, usize)>)> = Vec::new();
        for ev in &self.evidence {
            match grouped.iter_mut().find(|(d, _)| *d == ev.doc) {
                Some((_, spans)) => spans.push((ev.start, ev.end)),
                None => grouped.push((ev.doc.as_str(), alloc::vec![(ev.start, ev.end)])),
            }
        }
        grouped
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationSession {
    pub id: String,
    pub candidates: Vec<AlignmentCandidate>,
    pub merged: bool,
    pub created_ms: u64,
    pub updated_ms: u64,
    pub version: u64,
}

impl VerificationSession {
    pub fn candidate(&self, id: &str) -> Option<&AlignmentCandidate> {
        self.candidates.iter().find(|c| c.id == id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionFile {
    pub source_session: String,
    pub candidates: Vec<AlignmentCandidate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skipped {
    pub candidate: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeResult {
    pub inserted_nodes: usize,
    pub inserted_edges: usize,
    pub skipped: Vec<Skipped>,
    /// Ids of the created nodes and edges, in creation order.
    pub node_ids: Vec<String>,
    pub edge_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateContext {
    pub corpus: Vec<HighlightedContext>,
    /// Absent when the candidate is not linked to a graph node.
    pub graph: Option<Subgraph>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeSuggestion {
    pub type_label: String,
    pub mean_frequency: f64,
}

/// Entity types ranked by the mean frequency (degree plus mentions) of
/// their nodes, lowest first, ties by label.
pub fn suggest_expansion_types(
    graph: &PropertyGraph,
    corpus: &Corpus,
    k: usize,
) -> Result<Vec<TypeSuggestion>, WorkflowError> {
    if k == 0 {
        return Err(WorkflowError::InvalidK);
    }
    let mut ranked: Vec<TypeSuggestion> = graph
        .type_labels()
        .filter_map(|t| {
            let dist = analytics::entity_frequency(graph, t, corpus);
            if dist.entries.is_empty() {
                return None;
            }
            Some(TypeSuggestion {
                type_label: t.to_string(),
                mean_frequency: dist.total as f64 / dist.entries.len() as f64,
            })
        })
        .collect();
    ranked.sort_by(|a, b| {
        a.mean_frequency
            .total_cmp(&b.mean_frequency)
            .then_with(|| a.type_label.cmp(&b.type_label))
    });
    ranked.truncate(k);
    Ok(ranked)
}

fn merged_node_id(session: &str, candidate: &str) -> String {
    format!("merged:{session}:{candidate}")
}

fn validate_candidate(
    rec: &CandidateRecord,
    graph: &PropertyGraph,
    corpus: &Corpus,
) -> Result<(), String> {
    if rec.id.is_empty() {
        return Err("empty candidate id".to_string());
    }
    if rec.surface.is_empty() {
        return Err("empty surface".to_string());
    }
    for ev in &rec.evidence {
        let doc = corpus
            .document(&ev.doc)
            .ok_or_else(|| format!("unknown evidence document {:?}", ev.doc))?;
        if ev.start >= ev.end || ev.end > doc.char_len() {
            return Err(format!("evidence span [{}, {}) outside document {:?}", ev.start, ev.end, ev.doc));
        }
    }
    if let Some(node) = &rec.graph_node {
        if !graph.contains_node(node) {
            return Err(format!("unknown graph node {node:?}"));
        }
    }
    if rec.proposed_type.as_deref() == Some("") {
        return Err("empty proposed type".to_string());
    }
    if rec.proposed_edges.iter().flatten().any(|e| e.rel.is_empty()) {
        return Err("proposed edge with empty relation".to_string());
    }
    Ok(())
}

#[derive(Debug, Clone, Default)]
pub struct SessionStore {
    seeds: BTreeMap<String, SeedSession>,
    verifications: BTreeMap<String, VerificationSession>,
    next_seed: u64,
    next_verify: u64,
}

fn id_number(id: &str, prefix: &str) -> u64 {
    id.strip_prefix(prefix).and_then(|n| n.parse().ok()).unwrap_or(0)
}

impl SessionStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Re-registers a persisted session; later ids continue after it.
    pub fn restore_seed_session(&mut self, session: SeedSession) {
        self.next_seed = self.next_seed.max(id_number(&session.id, "seed-"));
        self.seeds.insert(session.id.clone(), session);
    }

    pub fn restore_verification_session(&mut self, session: VerificationSession) {
        self.next_verify = self.next_verify.max(id_number(&session.id, "verify-"));
        self.verifications.insert(session.id.clone(), session);
    }

    fn fresh_seed_id(&mut self) -> String {
        loop {
            self.next_seed += 1;
            let id = format!("seed-{}", self.next_seed);
            if !self.seeds.contains_key(&id) {
                return id;
            }
        }
    }

    fn fresh_verify_id(&mut self) -> String {
        loop {
            self.next_verify += 1;
            let id = format!("verify-{}", self.next_verify);
            if !self.verifications.contains_key(&id) {
                return id;
            }
        }
    }

    pub fn seed_sessions(&self) -> impl Iterator<Item = &SeedSession> {
        self.seeds.values()
    }

    pub fn verification_sessions(&self) -> impl Iterator<Item = &VerificationSession> {
        self.verifications.values()
    }

    pub fn seed_session(&self, id: &str) -> Result<&SeedSession, WorkflowError> {
        self.seeds.get(id).ok_or_else(|| WorkflowError::UnknownSession(id.to_string()))
    }

    pub fn verification_session(&self, id: &str) -> Result<&VerificationSession, WorkflowError> {
        self.verifications
            .get(id)
            .ok_or_else(|| WorkflowError::UnknownSession(id.to_string()))
    }

    fn seed_mut(&mut self, id: &str) -> Result<&mut SeedSession, WorkflowError> {
        self.seeds.get_mut(id).ok_or_else(|| WorkflowError::UnknownSession(id.to_string()))
    }

    fn verification_mut(&mut self, id: &str) -> Result<&mut VerificationSession, WorkflowError> {
        self.verifications
            .get_mut(id)
            .ok_or_else(|| WorkflowError::UnknownSession(id.to_string()))
    }

    pub fn create_seed_session(
        &mut self,
        graph: &PropertyGraph,
        entity_type: &str,
        now_ms: u64,
    ) -> Result<&SeedSession, WorkflowError> {
        if !graph.has_type(entity_type) {
            return Err(WorkflowError::UnknownType(entity_type.to_string()));
        }
        let id = self.fresh_seed_id();
        let session = SeedSession {
            id: id.clone(),
            entity_type: entity_type.to_string(),
            seeds: Vec::new(),
            created_ms: now_ms,
            updated_ms: now_ms,
            version: 1,
        };
        Ok(self.seeds.entry(id).or_insert(session))
    }

    pub fn add_seed(
        &mut self,
        graph: &PropertyGraph,
        session_id: &str,
        node_id: &str,
        now_ms: u64,
    ) -> Result<&SeedSession, WorkflowError> {
        let session = self.seed_mut(session_id)?;
        let node = graph
            .node(node_id)
            .ok_or_else(|| WorkflowError::UnknownNode(node_id.to_string()))?;
        if node.type_label != session.entity_type {
            return Err(WorkflowError::TypeMismatch {
                node: node_id.to_string(),
                expected: session.entity_type.clone(),
                found: node.type_label.clone(),
            });
        }
        if !session.seeds.iter().any(|s| s == node_id) {
            session.seeds.push(node_id.to_string());
            session.updated_ms = now_ms;
            session.version += 1;
        }
        Ok(session)
    }

    pub fn remove_seed(
        &mut self,
        graph: &PropertyGraph,
        session_id: &str,
        node_id: &str,
        now_ms: u64,
    ) -> Result<&SeedSession, WorkflowError> {
        let session = self.seed_mut(session_id)?;
        let pos = session.seeds.iter().position(|s| s == node_id);
        if pos.is_none() && !graph.contains_node(node_id) {
            return Err(WorkflowError::UnknownNode(node_id.to_string()));
        }
        if let Some(pos) = pos {
            session.seeds.remove(pos);
            session.updated_ms = now_ms;
            session.version += 1;
        }
        Ok(session)
    }

    pub fn export_seeds(&self, graph: &PropertyGraph, session_id: &str) -> Result<SeedFile, WorkflowError> {
        let session = self.seed_session(session_id)?;
        Ok(SeedFile {
            entity_type: session.entity_type.clone(),
            seeds: session
                .seeds
                .iter()
                .map(|id| SeedEntry {
                    node_id: id.clone(),
                    name: graph.node(id).map_or_else(|| id.clone(), |n| n.name.clone()),
                })
                .collect(),
        })
    }

    /// New session holding exactly the seeds of `file`, in file order.
    pub fn import_seeds(
        &mut self,
        graph: &PropertyGraph,
        file: &SeedFile,
        now_ms: u64,
    ) -> Result<&SeedSession, WorkflowError> {
        if !graph.has_type(&file.entity_type) {
            return Err(WorkflowError::UnknownType(file.entity_type.clone()));
        }
        let mut seen = BTreeSet::new();
        for entry in &file.seeds {
            let node = graph
                .node(&entry.node_id)
                .ok_or_else(|| WorkflowError::UnknownNode(entry.node_id.clone()))?;
            if node.type_label != file.entity_type {
                return Err(WorkflowError::TypeMismatch {
                    node: entry.node_id.clone(),
                    expected: file.entity_type.clone(),
                    found: node.type_label.clone(),
                });
            }
            if !seen.insert(entry.node_id.as_str()) {
                return Err(WorkflowError::InvalidSeedFile(format!("duplicate seed {:?}", entry.node_id)));
            }
        }
        let id = self.fresh_seed_id();
        let session = SeedSession {
            id: id.clone(),
            entity_type: file.entity_type.clone(),
            seeds: file.seeds.iter().map(|e| e.node_id.clone()).collect(),
            created_ms: now_ms,
            updated_ms: now_ms,
            version: 1,
        };
        Ok(self.seeds.entry(id).or_insert(session))
    }

    /// Builds a session from JSON-lines candidate records. Invalid records
    /// are reported and left out; valid ones start pending, in file order.
    pub fn create_verification_session<'a, I>(
        &mut self,
        graph: &PropertyGraph,
        corpus: &Corpus,
        lines: I,
        now_ms: u64,
    ) -> (&VerificationSession, Vec<Rejection>)
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut candidates: Vec<AlignmentCandidate> = Vec::new();
        let mut rejected = Vec::new();
        for (idx, line) in lines.into_iter().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let result = serde_json::from_str::<CandidateRecord>(line)
                .map_err(|e| format!("malformed candidate record: {e}"))
                .and_then(|rec| {
                    validate_candidate(&rec, graph, corpus)?;
                    if candidates.iter().any(|c| c.id == rec.id) {
                        return Err(format!("duplicate candidate id {:?}", rec.id));
                    }
                    Ok(rec)
                });
            match result {
                Ok(rec) => candidates.push(AlignmentCandidate {
                    id: rec.id,
                    surface: rec.surface,
                    evidence: rec.evidence,
                    graph_node: rec.graph_node,
                    proposed_type: rec.proposed_type,
                    proposed_edges: rec.proposed_edges.unwrap_or_default(),
                    decision: Decision::Pending,
                }),
                Err(reason) => rejected.push(Rejection {
                    kind: RecordKind::Candidate,
                    ordinal: idx + 1,
                    reason,
                }),
            }
        }
        let id = self.fresh_verify_id();
        let session = VerificationSession {
            id: id.clone(),
            candidates,
            merged: false,
            created_ms: now_ms,
            updated_ms: now_ms,
            version: 1,
        };
        (self.verifications.entry(id).or_insert(session), rejected)
    }

    pub fn set_decision(
        &mut self,
        session_id: &str,
        candidate_id: &str,
        decision: Decision,
        now_ms: u64,
    ) -> Result<&AlignmentCandidate, WorkflowError> {
        let session = self.verification_mut(session_id)?;
        if session.merged {
            return Err(WorkflowError::SessionMerged(session_id.to_string()));
        }
        let idx = session
            .candidates
            .iter()
            .position(|c| c.id == candidate_id)
            .ok_or_else(|| WorkflowError::UnknownCandidate(candidate_id.to_string()))?;
        let candidate = &mut session.candidates[idx];
        if decision == Decision::Insert && candidate.proposed_type.is_none() {
            return Err(WorkflowError::MissingProposal(candidate_id.to_string()));
        }
        if candidate.decision != decision {
            candidate.decision = decision;
            session.updated_ms = now_ms;
            session.version += 1;
        }
        Ok(&session.candidates[idx])
    }

    pub fn candidate_context(
        &self,
        graph: &PropertyGraph,
        corpus: &Corpus,
        session_id: &str,
        candidate_id: &str,
        window_chars: usize,
        node_cap: usize,
    ) -> Result<CandidateContext, WorkflowError> {
        let session = self.verification_session(session_id)?;
        let candidate = session
            .candidate(candidate_id)
            .ok_or_else(|| WorkflowError::UnknownCandidate(candidate_id.to_string()))?;
        let corpus_side = candidate
            .evidence_docs()
            .into_iter()
            .map(|(doc, spans)| corpus.context(doc, &spans, window_chars))
            .collect::<Result<Vec<_>, _>>()?;
        let graph_side = match &candidate.graph_node {
            Some(node) => Some(analytics::neighborhood(graph, node, 1, None, node_cap)?),
            None => None,
        };
        Ok(CandidateContext { corpus: corpus_side, graph: graph_side })
    }

    pub fn export_decisions(&self, session_id: &str) -> Result<DecisionFile, WorkflowError> {
        let session = self.verification_session(session_id)?;
        Ok(DecisionFile {
            source_session: session.id.clone(),
            candidates: session.candidates.clone(),
        })
    }

    /// New unmerged session carrying the candidates and decisions of a
    /// decision file. Deferred and pending candidates come back as they
    /// were, so deferred work can be picked up later.
    pub fn import_decisions(
        &mut self,
        graph: &PropertyGraph,
        corpus: &Corpus,
        file: &DecisionFile,
        now_ms: u64,
    ) -> (&VerificationSession, Vec<Rejection>) {
        let mut candidates: Vec<AlignmentCandidate> = Vec::new();
        let mut rejected = Vec::new();
        for (idx, cand) in file.candidates.iter().enumerate() {
            let rec = CandidateRecord {
                id: cand.id.clone(),
                surface: cand.surface.clone(),
                evidence: cand.evidence.clone(),
                graph_node: cand.graph_node.clone(),
                proposed_type: cand.proposed_type.clone(),
                proposed_edges: Some(cand.proposed_edges.clone()),
            };
            let check = validate_candidate(&rec, graph, corpus).and_then(|()| {
                if candidates.iter().any(|c| c.id == cand.id) {
                    Err(format!("duplicate candidate id {:?}", cand.id))
                } else if cand.decision == Decision::Insert && cand.proposed_type.is_none() {
                    Err("insert decision without proposed type".to_string())
                } else {
                    Ok(())
                }
            });
            match check {
                Ok(()) => candidates.push(cand.clone()),
                Err(reason) => rejected.push(Rejection {
                    kind: RecordKind::Candidate,
                    ordinal: idx + 1,
                    reason,
                }),
            }
        }
        let id = self.fresh_verify_id();
        let session = VerificationSession {
            id: id.clone(),
            candidates,
            merged: false,
            created_ms: now_ms,
            updated_ms: now_ms,
            version: 1,
        };
        (self.verifications.entry(id).or_insert(session), rejected)
    }

    /// Inserts every insert-decided candidate as a node (type = proposed
    /// type, name = surface) with its proposed edges, then marks the
    /// session merged. All checks run before the first write, so on error
    /// neither the graph nor the session changes.
    pub fn apply_merge(
        &mut self,
        graph: &mut PropertyGraph,
        session_id: &str,
        now_ms: u64,
    ) -> Result<MergeResult, WorkflowError> {
        let session = self.verification_mut(session_id)?;
        if session.merged {
            return Err(WorkflowError::AlreadyMerged(session_id.to_string()));
        }

        let inserts: Vec<&AlignmentCandidate> = session
            .candidates
            .iter()
            .filter(|c| c.decision == Decision::Insert)
            .collect();
        let new_ids: BTreeSet<String> = inserts.iter().map(|c| merged_node_id(session_id, &c.id)).collect();
        for cand in &inserts {
            match cand.proposed_type.as_deref() {
                None | Some("") => return Err(WorkflowError::MissingProposal(cand.id.clone())),
                Some(_) => {}
            }
            let node_id = merged_node_id(session_id, &cand.id);
            if graph.contains_node(&node_id) {
                return Err(WorkflowError::IdCollision(node_id));
            }
            for edge in &cand.proposed_edges {
                if !graph.contains_node(&edge.target) && !new_ids.contains(&edge.target) {
                    return Err(WorkflowError::UnknownEdgeTarget {
                        candidate: cand.id.clone(),
                        target: edge.target.clone(),
                    });
                }
            }
        }

        let mut provenance = Attrs::new();
        provenance.insert("source".into(), Scalar::from(MERGE_SOURCE));
        provenance.insert("session".into(), Scalar::from(session_id));
        let mut result = MergeResult {
            inserted_nodes: 0,
            inserted_edges: 0,
            skipped: Vec::new(),
            node_ids: Vec::new(),
            edge_ids: Vec::new(),
        };
        for cand in &inserts {
            let node_id = merged_node_id(session_id, &cand.id);
            let proposed_type = cand.proposed_type.as_deref().unwrap_or_default();
            graph
                .add_node(proposed_type, Some(&cand.surface), provenance.clone(), Some(&node_id))
                .expect("merge preconditions checked");
            result.inserted_nodes += 1;
            result.node_ids.push(node_id);
        }
        for cand in &inserts {
            let node_id = merged_node_id(session_id, &cand.id);
            for edge in &cand.proposed_edges {
                let (src, dst) = match edge.dir {
                    EdgeDir::Out => (node_id.as_str(), edge.target.as_str()),
                    EdgeDir::In => (edge.target.as_str(), node_id.as_str()),
                };
                let id = graph
                    .add_edge(src, dst, &edge.rel, provenance.clone(), None)
                    .expect("merge preconditions checked");
                result.inserted_edges += 1;
                result.edge_ids.push(id);
            }
        }
        result.skipped = session
            .candidates
            .iter()
            .filter(|c| c.decision != Decision::Insert)
            .map(|c| Skipped { candidate: c.id.clone(), reason: format!("decision: {}", c.decision.as_str()) })
            .collect();
        session.merged = true;
        session.updated_ms = now_ms;
        session.version += 1;
        Ok(result)
    }
}
