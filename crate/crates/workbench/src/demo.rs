//! Synthetic occupational knowledge graph with a matching corpus of job
//! postings. Output depends only on the seed.
//!
//! Shape: 100 occupations, 250 skills, 200 abilities, 150 knowledge areas
//! and 300 tasks; six relation types totalling 3000 edges; 200 postings
//! whose mentions are partly linked to graph nodes and partly not, plus
//! alignment candidates for the unlinked ones.

use std::collections::BTreeSet;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use workbench_core::corpus::{Document, MentionSpan};
use workbench_core::graph::{EdgeRecord, NodeRecord};
use workbench_core::workflows::{CandidateRecord, EdgeDir, Evidence, ProposedEdge};
use workbench_core::{Attrs, Scalar};

use crate::store::{write_jsonl, DataDir, StoreError, CANDIDATES_FILE, CORPUS_FILE, EDGES_FILE, NODES_FILE};

pub const DEFAULT_SEED: u64 = 42;

const LEVELS: [&str; 6] = ["Junior", "Senior", "Lead", "Principal", "Staff", "Associate"];
const FIELDS: [&str; 17] = [
    "Data", "Software", "Network", "Clinical", "Financial", "Marketing", "Supply Chain", "Security",
    "Research", "Civil", "Quality", "Product", "Energy", "Legal", "Hospitality", "Café", "Logistics",
];
const ROLES: [&str; 8] = ["Analyst", "Engineer", "Manager", "Specialist", "Technician", "Consultant", "Coordinator", "Scientist"];

const SKILL_VERBS: [&str; 10] = [
    "Active", "Critical", "Applied", "Technical", "Strategic", "Written", "Quantitative", "Visual", "Operational", "Collaborative",
];
const SKILL_NOUNS: [&str; 25] = [
    "Listening", "Reasoning", "Writing", "Programming", "Negotiation", "Troubleshooting", "Monitoring", "Scheduling",
    "Budgeting", "Forecasting", "Coaching", "Persuasion", "Modeling", "Testing", "Auditing", "Design", "Documentation",
    "Mediation", "Procurement", "Instruction", "Inspection", "Analysis", "Planning", "Reporting", "Prototyping",
];
const ABILITY_ADJ: [&str; 10] = ["Oral", "Written", "Manual", "Spatial", "Selective", "Deductive", "Inductive", "Visual", "Auditory", "Static"];
const ABILITY_NOUNS: [&str; 20] = [
    "Comprehension", "Expression", "Dexterity", "Orientation", "Attention", "Memorization", "Perception", "Flexibility",
    "Sensitivity", "Coordination", "Recall", "Clarity", "Speed", "Stamina", "Precision", "Control", "Judgement",
    "Fluency", "Originality", "Visualization",
];
const KNOWLEDGE_PREFIX: [&str; 6] = ["Applied", "Advanced", "General", "Industrial", "Public", "Computational"];
const KNOWLEDGE_AREAS: [&str; 25] = [
    "Mathematics", "Economics", "Chemistry", "Biology", "Psychology", "Law", "Geography", "Physics", "Linguistics",
    "Statistics", "Accounting", "Medicine", "Engineering", "Telecommunications", "Sociology", "Philosophy",
    "Education", "Transportation", "Food Production", "Administration", "Design", "Fine Arts", "History",
    "Personnel", "Sales",
];
const TASK_VERBS: [&str; 15] = [
    "Prepare", "Review", "Maintain", "Analyze", "Coordinate", "Inspect", "Develop", "Evaluate", "Document",
    "Negotiate", "Install", "Monitor", "Present", "Train", "Calibrate",
];
const TASK_OBJECTS: [&str; 20] = [
    "budget reports", "client contracts", "network equipment", "patient records", "test plans", "supplier quotes",
    "safety procedures", "data pipelines", "marketing campaigns", "inventory levels", "research proposals",
    "quality audits", "training materials", "site surveys", "financial models", "service tickets",
    "production schedules", "legal filings", "energy usage", "menu costings",
];
/// Surfaces that appear in postings but are not in the graph.
const EMERGING: [&str; 12] = [
    "prompt engineering", "Kubernetes", "vector databases", "ESG reporting", "low-code tooling", "MLOps",
    "zero-trust architecture", "Rust programming", "dbt modelling", "data mesh", "edge computing", "résumé screening",
];
const CITIES: [&str; 8] = ["Zürich", "São Paulo", "Kraków", "Montréal", "Reykjavík", "Berlin", "Austin", "Osaka"];

#[derive(Debug, Clone, Serialize)]
pub struct DemoSummary {
    pub nodes: usize,
    pub edges: usize,
    pub documents: usize,
    pub mentions: usize,
    pub candidates: usize,
}

pub struct DemoData {
    pub nodes: Vec<NodeRecord>,
    pub edges: Vec<EdgeRecord>,
    pub documents: Vec<Document>,
    pub candidates: Vec<CandidateRecord>,
}

impl DemoData {
    pub fn summary(&self) -> DemoSummary {
        DemoSummary {
            nodes: self.nodes.len(),
            edges: self.edges.len(),
            documents: self.documents.len(),
            mentions: self.documents.iter().map(|d| d.mentions.len()).sum(),
            candidates: self.candidates.len(),
        }
    }

    pub fn write(&self, dir: &DataDir) -> Result<DemoSummary, StoreError> {
        write_jsonl(&dir.path(NODES_FILE), &self.nodes)?;
        write_jsonl(&dir.path(EDGES_FILE), &self.edges)?;
        write_jsonl(&dir.path(CORPUS_FILE), &self.documents)?;
        write_jsonl(&dir.path(CANDIDATES_FILE), &self.candidates)?;
        Ok(self.summary())
    }
}

/// Unique names drawn from the product of two word lists.
fn names(rng: &mut ChaCha8Rng, a: &[&str], b: &[&str], n: usize, join: &str) -> Vec<String> {
    let mut all: Vec<String> = a.iter().flat_map(|x| b.iter().map(move |y| format!("{x}{join}{y}"))).collect();
    all.shuffle(rng);
    assert!(all.len() >= n, "word lists too small");
    all.truncate(n);
    all
}

fn occupation_names(rng: &mut ChaCha8Rng, n: usize) -> Vec<String> {
    let mut all = Vec::new();
    for l in LEVELS {
        for f in FIELDS {
            for r in ROLES {
                all.push(format!("{l} {f} {r}"));
            }
        }
    }
    all.shuffle(rng);
    all.truncate(n);
    all
}

fn node(id: String, type_label: &str, name: &str, attrs: Attrs) -> NodeRecord {
    NodeRecord {
        id: Some(id),
        type_label: type_label.to_string(),
        name: Some(name.to_string()),
        attrs: Some(attrs),
    }
}

struct Entity {
    id: String,
    name: String,
}

/// Builds text while tracking code-point offsets of inserted mentions.
struct Writer {
    text: String,
    len: usize,
    mentions: Vec<MentionSpan>,
}

impl Writer {
    fn new() -> Self {
        Writer { text: String::new(), len: 0, mentions: Vec::new() }
    }

    fn plain(&mut self, s: &str) {
        self.text.push_str(s);
        self.len += s.chars().count();
    }

    fn mention(&mut self, surface: &str, node_id: Option<&str>) -> (usize, usize) {
        let start = self.len;
        self.plain(surface);
        self.mentions.push(MentionSpan {
            start,
            end: self.len,
            surface: surface.to_string(),
            node_id: node_id.map(str::to_string),
        });
        (start, self.len)
    }
}

pub fn generate(seed: u64) -> DemoData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = Vec::new();

    let occ_names = occupation_names(&mut rng, 100);
    let occupations: Vec<Entity> = occ_names
        .iter()
        .enumerate()
        .map(|(i, name)| Entity { id: format!("occ-{:03}", i + 1), name: name.clone() })
        .collect();
    for o in &occupations {
        let mut attrs = Attrs::new();
        attrs.insert("job_zone".into(), Scalar::Number(f64::from(rng.random_range(1..=5u8))));
        attrs.insert("bright_outlook".into(), Scalar::Bool(rng.random_bool(0.3)));
        nodes.push(node(o.id.clone(), "Occupation", &o.name, attrs));
    }

    let mut typed = |prefix: &str, type_label: &str, names: Vec<String>, rng: &mut ChaCha8Rng| -> Vec<Entity> {
        let out: Vec<Entity> = names
            .into_iter()
            .enumerate()
            .map(|(i, name)| Entity { id: format!("{prefix}-{:03}", i + 1), name })
            .collect();
        for e in &out {
            let mut attrs = Attrs::new();
            attrs.insert("level".into(), Scalar::Number(f64::from(rng.random_range(1..=7u8))));
            nodes.push(node(e.id.clone(), type_label, &e.name, attrs));
        }
        out
    };
    let skill_names = names(&mut rng, &SKILL_VERBS, &SKILL_NOUNS, 250, " ");
    let skills = typed("skill", "Skill", skill_names, &mut rng);
    let ability_names = names(&mut rng, &ABILITY_ADJ, &ABILITY_NOUNS, 200, " ");
    let abilities = typed("abil", "Ability", ability_names, &mut rng);
    let knowledge_names = names(&mut rng, &KNOWLEDGE_PREFIX, &KNOWLEDGE_AREAS, 150, " ");
    let knowledge = typed("know", "Knowledge", knowledge_names, &mut rng);
    let task_names = names(&mut rng, &TASK_VERBS, &TASK_OBJECTS, 300, " ");
    let tasks = typed("task", "Task", task_names, &mut rng);

    // (occupation index, picks) per relation, kept for the corpus
    let mut edges = Vec::new();
    let mut edge = |src: &str, dst: &str, rel: &str, rng: &mut ChaCha8Rng| {
        let mut attrs = Attrs::new();
        attrs.insert("importance".into(), Scalar::Number(f64::from(rng.random_range(1..=5u8))));
        edges.push(EdgeRecord {
            id: Some(format!("e{:05}", edges.len() + 1)),
            src: src.to_string(),
            dst: dst.to_string(),
            rel: rel.to_string(),
            attrs: Some(attrs),
        });
    };
    let mut profile: Vec<[Vec<usize>; 4]> = Vec::new();
    for o in &occupations {
        let s = rand::seq::index::sample(&mut rng, skills.len(), 8).into_vec();
        let a = rand::seq::index::sample(&mut rng, abilities.len(), 4).into_vec();
        let k = rand::seq::index::sample(&mut rng, knowledge.len(), 3).into_vec();
        let t = rand::seq::index::sample(&mut rng, tasks.len(), 5).into_vec();
        for &i in &s {
            edge(&o.id, &skills[i].id, "requires_skill", &mut rng);
        }
        for &i in &a {
            edge(&o.id, &abilities[i].id, "requires_ability", &mut rng);
        }
        for &i in &k {
            edge(&o.id, &knowledge[i].id, "requires_knowledge", &mut rng);
        }
        for &i in &t {
            edge(&o.id, &tasks[i].id, "performs_task", &mut rng);
        }
        profile.push([s, a, k, t]);
    }
    for t in &tasks {
        for i in rand::seq::index::sample(&mut rng, skills.len(), 3) {
            edge(&t.id, &skills[i].id, "task_uses_skill", &mut rng);
        }
    }
    let mut related = BTreeSet::new();
    while related.len() < occupations.len() {
        let (a, b) = (rng.random_range(0..occupations.len()), rng.random_range(0..occupations.len()));
        if a != b && related.insert((a.min(b), a.max(b))) {
            edge(&occupations[a].id, &occupations[b].id, "related_occupation", &mut rng);
        }
    }

    let mut documents = Vec::new();
    let mut candidates = Vec::new();
    for d in 0..200 {
        let oi = d % occupations.len();
        let occ = &occupations[oi];
        let [s, a, k, t] = &profile[oi];
        let mut w = Writer::new();
        let city = CITIES.choose(&mut rng).expect("non-empty");
        w.plain(&format!("{city} — we are hiring a "));
        w.mention(&occ.name, Some(&occ.id));
        w.plain(". You will ");
        let task = &tasks[t[d % t.len()]];
        let lower = task.name.to_lowercase();
        w.mention(&lower, Some(&task.id));
        w.plain(" and work closely with the team. Must bring ");
        let picks: Vec<usize> = s.choose_multiple(&mut rng, 3).copied().collect();
        for (j, &i) in picks.iter().enumerate() {
            if j > 0 {
                w.plain(if j + 1 == picks.len() { " and " } else { ", " });
            }
            w.mention(&skills[i].name, Some(&skills[i].id));
        }
        w.plain(". Familiarity with ");
        let kn = &knowledge[k[d % k.len()]];
        w.mention(&kn.name, Some(&kn.id));
        w.plain(" is expected; ");
        let ab = &abilities[a[d % a.len()]];
        w.mention(&ab.name, None);
        w.plain(" is a plus.");
        // roughly every third posting names a skill the graph lacks
        if rng.random_bool(0.35) {
            let surface = EMERGING.choose(&mut rng).expect("non-empty");
            w.plain(" Bonus points for ");
            let (start, end) = w.mention(surface, None);
            w.plain(" experience.");
            let doc_id = format!("doc-{:03}", d + 1);
            candidates.push(json!({"surface": surface, "doc": doc_id, "start": start, "end": end, "occ": occ.id}));
        }
        documents.push(Document {
            id: format!("doc-{:03}", d + 1),
            title: Some(format!("{} ({city})", occ.name)),
            text: w.text,
            mentions: w.mentions,
        });
    }

    // Group unlinked mentions by surface into proposals; ability mentions
    // that exist in the graph become alignment-only candidates.
    let mut out = Vec::new();
    for surface in EMERGING {
        let hits: Vec<&serde_json::Value> = candidates.iter().filter(|c| c["surface"] == surface).collect();
        if hits.is_empty() {
            continue;
        }
        let evidence = hits
            .iter()
            .map(|h| Evidence {
                doc: h["doc"].as_str().expect("str").to_string(),
                start: h["start"].as_u64().expect("num") as usize,
                end: h["end"].as_u64().expect("num") as usize,
            })
            .collect();
        let targets: BTreeSet<&str> = hits.iter().filter_map(|h| h["occ"].as_str()).take(3).collect();
        out.push(CandidateRecord {
            id: format!("cand-{:03}", out.len() + 1),
            surface: surface.to_string(),
            evidence,
            graph_node: None,
            proposed_type: Some("Skill".into()),
            proposed_edges: Some(
                targets
                    .into_iter()
                    .map(|t| ProposedEdge { rel: "requires_skill".into(), target: t.to_string(), dir: EdgeDir::In })
                    .collect(),
            ),
        });
    }
    for doc in documents.iter().take(20) {
        let m = doc.mentions.iter().find(|m| m.node_id.is_none() && !EMERGING.contains(&m.surface.as_str()));
        if let Some(m) = m {
            let ability = abilities.iter().find(|a| a.name == m.surface).expect("ability mention");
            out.push(CandidateRecord {
                id: format!("cand-{:03}", out.len() + 1),
                surface: m.surface.clone(),
                evidence: vec![Evidence { doc: doc.id.clone(), start: m.start, end: m.end }],
                graph_node: Some(ability.id.clone()),
                proposed_type: None,
                proposed_edges: None,
            });
        }
    }

    DemoData { nodes, edges, documents, candidates: out }
}

/// Writes the dataset into `dir`, which must not already hold a workspace
/// unless `force` is set.
pub fn write_demo(dir: &DataDir, seed: u64, force: bool) -> anyhow::Result<DemoSummary> {
    if dir.has_store_files() {
        anyhow::ensure!(force, "{} already holds a workspace; pass --force to replace it", dir.root().display());
        dir.clear()?;
    }
    Ok(generate(seed).write(dir)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_sized() {
        let a = generate(7);
        let b = generate(7);
        assert_eq!(serde_json::to_string(&a.documents).unwrap(), serde_json::to_string(&b.documents).unwrap());
        assert_eq!(a.edges, b.edges);
        let s = a.summary();
        assert_eq!((s.nodes, s.edges, s.documents), (1000, 3000, 200));
        assert!(s.candidates > 0);
        assert_ne!(serde_json::to_string(&generate(8).edges).unwrap(), serde_json::to_string(&a.edges).unwrap());
    }

    #[test]
    fn spans_match_text() {
        for doc in generate(DEFAULT_SEED).documents {
            for m in &doc.mentions {
                assert_eq!(doc.slice(m.start, m.end), Some(m.surface.as_str()), "{}", doc.id);
            }
        }
    }
}
