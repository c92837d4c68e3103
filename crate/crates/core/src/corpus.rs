//! Documents with code-point mention spans, the surface/node mention
//! indexes, and highlighted excerpts.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::graph::{RecordKind, Rejection};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MentionSpan {
    /// Code-point offset, inclusive.
    pub start: usize,
    /// Code-point offset, exclusive.
    pub end: usize,
    pub surface: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    pub text: String,
    #[serde(default)]
    pub mentions: Vec<MentionSpan>,
}

impl Document {
    pub fn char_len(&self) -> usize {
        self.text.chars().count()
    }

    /// `text[start, end)` in code points; `None` when out of bounds.
    pub fn slice(&self, start: usize, end: usize) -> Option<&str> {
        char_slice(&self.text, start, end)
    }
}

pub(crate) fn char_slice(text: &str, start: usize, end: usize) -> Option<&str> {
    if start > end {
        return None;
    }
    let mut boundaries = text.char_indices().map(|(b, _)| b).chain(core::iter::once(text.len()));
    let from = boundaries.nth(start)?;
    let to = if end == start { from } else { boundaries.nth(end - start - 1)? };
    Some(&text[from..to])
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CorpusError {
    #[error("document {0:?} not found")]
    NotFound(String),
    #[error("span [{start}, {end}) is outside document {doc_id:?}")]
    SpanOutOfRange { doc_id: String, start: usize, end: usize },
    #[error("no spans given")]
    NoSpans,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusIngestReport {
    pub documents_added: usize,
    pub mentions_added: usize,
    /// Spans discarded because they overlapped a longer or earlier span.
    pub overlaps_dropped: usize,
    pub rejected: Vec<Rejection>,
    #[serde(skip)]
    pub added_doc_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MentionKey {
    Surface(String),
    Node(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocMentions {
    pub doc_id: String,
    pub spans: Vec<MentionSpan>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub text: String,
    pub highlighted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HighlightedContext {
    pub doc_id: String,
    pub segments: Vec<Segment>,
    pub window: Window,
}

impl HighlightedContext {
    pub fn excerpt(&self) -> String {
        self.segments.iter().map(|s| s.text.as_str()).collect()
    }
}

type MentionIndex = BTreeMap<String, BTreeMap<String, Vec<usize>>>;

#[derive(Debug, Clone, Default)]
pub struct Corpus {
    docs: BTreeMap<String, Document>,
    by_surface: MentionIndex,
    by_node: MentionIndex,
    version: u64,
}

/// Keeps the longer of two overlapping spans, then the earlier one.
/// Returns the surviving spans in start order and how many were dropped.
pub fn resolve_overlaps(mut spans: Vec<MentionSpan>) -> (Vec<MentionSpan>, usize) {
    let total = spans.len();
    spans.sort_by(|a, b| {
        (b.end - b.start)
            .cmp(&(a.end - a.start))
            .then(a.start.cmp(&b.start))
    });
    let mut kept: Vec<MentionSpan> = Vec::with_capacity(spans.len());
    for span in spans {
        if kept.iter().all(|k| span.end <= k.start || k.end <= span.start) {
            kept.push(span);
        }
    }
    kept.sort_by_key(|s| (s.start, s.end));
    let dropped = total - kept.len();
    (kept, dropped)
}

impl Corpus {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn document(&self, id: &str) -> Option<&Document> {
        self.docs.get(id)
    }

    pub fn documents(&self) -> impl Iterator<Item = &Document> {
        self.docs.values()
    }

    /// Validates and stores one document. Every span must sit inside the
    /// text and match its surface; overlapping spans are then resolved.
    pub fn add_document(&mut self, mut doc: Document) -> Result<(usize, usize), String> {
        if doc.id.is_empty() {
            return Err("empty document id".to_string());
        }
        if self.docs.contains_key(&doc.id) {
            return Err(format!("duplicate document id {:?}", doc.id));
        }
        let len = doc.char_len();
        for m in &doc.mentions {
            if m.start >= m.end || m.end > len {
                return Err(format!("span [{}, {}) out of range", m.start, m.end));
            }
            if doc.slice(m.start, m.end) != Some(m.surface.as_str()) {
                return Err("span/text mismatch".to_string());
            }
        }
        let (kept, dropped) = resolve_overlaps(core::mem::take(&mut doc.mentions));
        doc.mentions = kept;
        for (i, m) in doc.mentions.iter().enumerate() {
            self.by_surface
                .entry(m.surface.to_lowercase())
                .or_default()
                .entry(doc.id.clone())
                .or_default()
                .push(i);
            if let Some(node) = &m.node_id {
                self.by_node
                    .entry(node.clone())
                    .or_default()
                    .entry(doc.id.clone())
                    .or_default()
                    .push(i);
            }
        }
        let added = doc.mentions.len();
        self.docs.insert(doc.id.clone(), doc);
        self.version += 1;
        Ok((added, dropped))
    }

    /// Applies JSON-lines document records; each is accepted or rejected
    /// whole.
    pub fn ingest_corpus<'a, I>(&mut self, lines: I) -> CorpusIngestReport
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut report = CorpusIngestReport::default();
        for (idx, line) in lines.into_iter().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let result = serde_json::from_str::<Document>(line)
                .map_err(|e| format!("malformed document record: {e}"))
                .and_then(|doc| {
                    let id = doc.id.clone();
                    self.add_document(doc).map(|counts| (id, counts))
                });
            match result {
                Ok((id, (added, dropped))) => {
                    report.documents_added += 1;
                    report.mentions_added += added;
                    report.overlaps_dropped += dropped;
                    report.added_doc_ids.push(id);
                }
                Err(reason) => report.rejected.push(Rejection {
                    kind: RecordKind::Document,
                    ordinal: idx + 1,
                    reason,
                }),
            }
        }
        report
    }

    /// Surface keys match case-insensitively against whole span surfaces.
    /// Results are ordered by document id, spans by offset.
    pub fn mentions_of(&self, key: &MentionKey) -> Vec<DocMentions> {
        let hits = match key {
            MentionKey::Surface(s) => self.by_surface.get(&s.to_lowercase()),
            MentionKey::Node(n) => self.by_node.get(n),
        };
        hits.into_iter()
            .flatten()
            .map(|(doc_id, idxs)| {
                let doc = &self.docs[doc_id];
                DocMentions {
                    doc_id: doc_id.clone(),
                    spans: idxs.iter().map(|&i| doc.mentions[i].clone()).collect(),
                }
            })
            .collect()
    }

    /// Number of spans linked to a graph node across all documents.
    pub fn mention_count(&self, node_id: &str) -> usize {
        self.by_node
            .get(node_id)
            .map_or(0, |docs| docs.values().map(Vec::len).sum())
    }

    /// Excerpt around the bounding range of `spans`, widened by
    /// `window_chars` code points on each side and clamped to the text.
    /// Overlapping requested spans are highlighted as one fragment.
    pub fn context(
        &self,
        doc_id: &str,
        spans: &[(usize, usize)],
        window_chars: usize,
    ) -> Result<HighlightedContext, CorpusError> {
        let doc = self
            .docs
            .get(doc_id)
            .ok_or_else(|| CorpusError::NotFound(doc_id.to_string()))?;
        if spans.is_empty() {
            return Err(CorpusError::NoSpans);
        }
        let len = doc.char_len();
        let mut sorted: Vec<(usize, usize)> = spans.to_vec();
        for &(start, end) in &sorted {
            if start >= end || end > len {
                return Err(CorpusError::SpanOutOfRange { doc_id: doc_id.to_string(), start, end });
            }
        }
        sorted.sort_unstable();
        let mut merged: Vec<(usize, usize)> = Vec::with_capacity(sorted.len());
        for (s, e) in sorted {
            match merged.last_mut() {
                Some(last) if s < last.1 => last.1 = last.1.max(e),
                _ => merged.push((s, e)),
            }
        }
        let lo = merged[0].0.saturating_sub(window_chars);
        let hi = (merged.iter().map(|m| m.1).max().unwrap_or(0) + window_chars).min(len);

        let chars: Vec<char> = doc.text.chars().collect();
        let piece = |a: usize, b: usize| -> String { chars[a..b].iter().collect() };
        let mut segments = Vec::new();
        let mut cursor = lo;
        for (s, e) in merged {
            if cursor < s {
                segments.push(Segment { text: piece(cursor, s), highlighted: false });
            }
            segments.push(Segment { text: piece(s, e), highlighted: true });
            cursor = e;
        }
        if cursor < hi {
            segments.push(Segment { text: piece(cursor, hi), highlighted: false });
        }
        Ok(HighlightedContext {
            doc_id: doc_id.to_string(),
            segments,
            window: Window { start: lo, end: hi },
        })
    }

    /// Full-scan check that every stored span still matches its text.
    pub fn verify_spans(&self) -> Result<usize, String> {
        let mut checked = 0;
        for doc in self.docs.values() {
            for m in &doc.mentions {
                if doc.slice(m.start, m.end) != Some(m.surface.as_str()) {
                    return Err(format!("doc {} span [{}, {}) mismatch", doc.id, m.start, m.end));
                }
                checked += 1;
            }
        }
        Ok(checked)
    }
}
