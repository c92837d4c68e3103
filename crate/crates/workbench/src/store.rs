//! On-disk layout of a data directory and the in-memory workspace loaded
//! from it.
//!
//! ```text
//! <data-dir>/nodes.jsonl        node records, one per line, with ids
//! <data-dir>/edges.jsonl        edge records
//! <data-dir>/corpus.jsonl       documents with mention spans
//! <data-dir>/history.jsonl      exploration states, in recording order
//! <data-dir>/sessions/seeds/<id>.json
//! <data-dir>/sessions/verify/<id>.json
//! ```
//!
//! Every accepted write is appended (or, for sessions, rewritten) with its
//! final id, so loading the directory again reproduces the same workspace.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use workbench_core::corpus::CorpusIngestReport;
use workbench_core::graph::{EdgeRecord, IngestReport, NodeRecord};
use workbench_core::history::ExplorationState;
use workbench_core::workflows::{SeedSession, VerificationSession};
use workbench_core::{Corpus, History, PropertyGraph, SessionStore, Snapshot};

pub const NODES_FILE: &str = "nodes.jsonl";
pub const EDGES_FILE: &str = "edges.jsonl";
pub const CORPUS_FILE: &str = "corpus.jsonl";
pub const HISTORY_FILE: &str = "history.jsonl";
pub const CANDIDATES_FILE: &str = "candidates.jsonl";

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("data directory {path}: {reason}")]
    BadDataDir { path: PathBuf, reason: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {reason}")]
    Corrupt { path: PathBuf, line: usize, reason: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io { path: path.to_path_buf(), source }
}

pub fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

/// Reads a file as lines; a missing file reads as empty.
pub fn read_lines(path: &Path) -> Result<Vec<String>, StoreError> {
    match File::open(path) {
        Ok(f) => BufReader::new(f).lines().collect::<Result<_, _>>().map_err(io_err(path)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Vec::new()),
        Err(e) => Err(io_err(path)(e)),
    }
}

pub fn write_jsonl<T: Serialize>(path: &Path, records: impl IntoIterator<Item = T>) -> Result<(), StoreError> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(&r).expect("records serialize"));
        out.push('\n');
    }
    fs::write(path, out).map_err(io_err(path))
}

#[derive(Debug, Clone)]
pub struct DataDir {
    root: PathBuf,
}

impl DataDir {
    /// Opens an existing directory; `create` makes it first if missing.
    pub fn open(root: impl Into<PathBuf>, create: bool) -> Result<Self, StoreError> {
        let root = root.into();
        if create {
            fs::create_dir_all(&root).map_err(|e| StoreError::BadDataDir {
                path: root.clone(),
                reason: e.to_string(),
            })?;
        }
        match fs::metadata(&root) {
            Ok(m) if m.is_dir() => {}
            Ok(_) => {
                return Err(StoreError::BadDataDir { path: root, reason: "not a directory".into() });
            }
            Err(e) => return Err(StoreError::BadDataDir { path: root, reason: e.to_string() }),
        }
        fs::read_dir(&root).map_err(|e| StoreError::BadDataDir { path: root.clone(), reason: e.to_string() })?;
        Ok(DataDir { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path(&self, file: &str) -> PathBuf {
        self.root.join(file)
    }

    fn seeds_dir(&self) -> PathBuf {
        self.root.join("sessions").join("seeds")
    }

    fn verify_dir(&self) -> PathBuf {
        self.root.join("sessions").join("verify")
    }

    fn append<T: Serialize>(&self, file: &str, records: impl IntoIterator<Item = T>) -> Result<(), StoreError> {
        let path = self.path(file);
        let mut buf = String::new();
        for r in records {
            buf.push_str(&serde_json::to_string(&r).expect("records serialize"));
            buf.push('\n');
        }
        if buf.is_empty() {
            return Ok(());
        }
        let mut f = OpenOptions::new().create(true).append(true).open(&path).map_err(io_err(&path))?;
        f.write_all(buf.as_bytes()).map_err(io_err(&path))
    }

    fn write_atomic(&self, dir: &Path, name: &str, body: &str) -> Result<(), StoreError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let tmp = dir.join(format!(".{name}.tmp"));
        let dst = dir.join(name);
        fs::write(&tmp, body).map_err(io_err(&tmp))?;
        fs::rename(&tmp, &dst).map_err(io_err(&dst))
    }

    pub fn save_seed_session(&self, s: &SeedSession) -> Result<(), StoreError> {
        let body = serde_json::to_string_pretty(s).expect("sessions serialize");
        self.write_atomic(&self.seeds_dir(), &format!("{}.json", s.id), &body)
    }

    pub fn save_verification_session(&self, s: &VerificationSession) -> Result<(), StoreError> {
        let body = serde_json::to_string_pretty(s).expect("sessions serialize");
        self.write_atomic(&self.verify_dir(), &format!("{}.json", s.id), &body)
    }

    /// True when any file this module owns is present.
    pub fn has_store_files(&self) -> bool {
        [NODES_FILE, EDGES_FILE, CORPUS_FILE, HISTORY_FILE, "sessions"]
            .iter()
            .any(|f| self.path(f).exists())
    }

    /// Removes every file this module owns.
    pub fn clear(&self) -> Result<(), StoreError> {
        for f in [NODES_FILE, EDGES_FILE, CORPUS_FILE, HISTORY_FILE, CANDIDATES_FILE] {
            let p = self.path(f);
            if p.exists() {
                fs::remove_file(&p).map_err(io_err(&p))?;
            }
        }
        let sessions = self.path("sessions");
        if sessions.exists() {
            fs::remove_dir_all(&sessions).map_err(io_err(&sessions))?;
        }
        Ok(())
    }
}

fn read_json_dir<T: serde::de::DeserializeOwned>(dir: &Path) -> Result<Vec<T>, StoreError> {
    let entries = match fs::read_dir(dir) {
        Ok(e) => e,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(io_err(dir)(e)),
    };
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let text = fs::read_to_string(&p).map_err(io_err(&p))?;
            serde_json::from_str(&text).map_err(|e| StoreError::Corrupt { path: p.clone(), line: e.line(), reason: e.to_string() })
        })
        .collect()
}

/// Everything the service and the CLI operate on.
#[derive(Debug, Default)]
pub struct Workspace {
    pub graph: PropertyGraph,
    pub corpus: Corpus,
    pub sessions: SessionStore,
    pub history: History,
    pub node_cap: usize,
    dir: Option<DataDir>,
}

/// What loading a data directory skipped. Persisted files are written by
/// this crate, so anything here means the directory was edited by hand.
#[derive(Debug, Default, Serialize)]
pub struct LoadReport {
    pub graph: IngestReport,
    pub corpus: CorpusIngestReport,
}

impl Workspace {
    /// An empty workspace that persists nothing.
    pub fn in_memory(node_cap: usize) -> Self {
        Workspace { node_cap, ..Default::default() }
    }

    pub fn load(dir: DataDir, node_cap: usize) -> Result<(Self, LoadReport), StoreError> {
        let mut ws = Workspace::in_memory(node_cap);
        let nodes = read_lines(&dir.path(NODES_FILE))?;
        let edges = read_lines(&dir.path(EDGES_FILE))?;
        let graph = ws.graph.ingest_graph(nodes.iter().map(String::as_str), edges.iter().map(String::as_str));
        let docs = read_lines(&dir.path(CORPUS_FILE))?;
        let corpus = ws.corpus.ingest_corpus(docs.iter().map(String::as_str));
        for s in read_json_dir::<SeedSession>(&dir.seeds_dir())? {
            ws.sessions.restore_seed_session(s);
        }
        for s in read_json_dir::<VerificationSession>(&dir.verify_dir())? {
            ws.sessions.restore_verification_session(s);
        }
        let history_path = dir.path(HISTORY_FILE);
        for (i, line) in read_lines(&history_path)?.iter().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let corrupt = |reason: String| StoreError::Corrupt { path: history_path.clone(), line: i + 1, reason };
            let state: ExplorationState = serde_json::from_str(line).map_err(|e| corrupt(e.to_string()))?;
            ws.history.load_state(state).map_err(|e| corrupt(e.to_string()))?;
        }
        ws.dir = Some(dir);
        Ok((ws, LoadReport { graph, corpus }))
    }

    pub fn data_dir(&self) -> Option<&DataDir> {
        self.dir.as_ref()
    }

    pub fn snapshot(&self) -> Snapshot<'_> {
        let mut snap = Snapshot::new(&self.graph, &self.corpus, &self.sessions);
        snap.default_cap = self.node_cap;
        snap
    }

    /// Appends the given graph elements, by id, to the node and edge files.
    pub fn persist_graph(&self, node_ids: &[String], edge_ids: &[String]) -> Result<(), StoreError> {
        let Some(dir) = &self.dir else { return Ok(()) };
        dir.append(NODES_FILE, node_ids.iter().filter_map(|id| self.graph.node(id)).map(NodeRecord::from))?;
        dir.append(EDGES_FILE, edge_ids.iter().filter_map(|id| self.graph.edge(id)).map(EdgeRecord::from))
    }

    pub fn persist_documents(&self, doc_ids: &[String]) -> Result<(), StoreError> {
        let Some(dir) = &self.dir else { return Ok(()) };
        dir.append(CORPUS_FILE, doc_ids.iter().filter_map(|id| self.corpus.document(id)))
    }

    pub fn persist_seed_session(&self, id: &str) -> Result<(), StoreError> {
        match (&self.dir, self.sessions.seed_session(id)) {
            (Some(dir), Ok(s)) => dir.save_seed_session(s),
            _ => Ok(()),
        }
    }

    pub fn persist_verification_session(&self, id: &str) -> Result<(), StoreError> {
        match (&self.dir, self.sessions.verification_session(id)) {
            (Some(dir), Ok(s)) => dir.save_verification_session(s),
            _ => Ok(()),
        }
    }

    pub fn persist_state(&self, id: &str) -> Result<(), StoreError> {
        match (&self.dir, self.history.get(id)) {
            (Some(dir), Some(s)) => dir.append(HISTORY_FILE, [s]),
            _ => Ok(()),
        }
    }
}
