//! Core of the knowledge-graph workbench.
//!
//! Everything in this crate is pure computation over in-memory data: the
//! property graph, a one-hop pattern query language, overview/detail
//! analytics, the mention-annotated corpus, the seed-selection and
//! alignment-verification state machines, and the replayable exploration
//! history. It needs only `alloc`; clocks, files, sockets and locking are
//! supplied by the `workbench` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analytics;
pub mod corpus;
pub mod graph;
pub mod history;
pub mod ops;
pub mod query;
pub mod workflows;

pub use analytics::{DegreeProfile, Distribution, FacetedGraph, Subgraph};
pub use corpus::{Corpus, CorpusError, Document, HighlightedContext, MentionKey, MentionSpan};
pub use graph::{Edge, GraphError, IngestReport, Node, PropertyGraph, Scalar};
pub use history::{ExplorationState, History, HistoryError};
pub use ops::{OpError, Snapshot};
pub use query::{QueryAst, QueryError, ResultTable};
pub use workflows::{Decision, SessionStore, WorkflowError};

/// Attribute map shared by nodes and edges.
pub type Attrs = alloc::collections::BTreeMap<alloc::string::String, Scalar>;
