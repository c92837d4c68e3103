//! Service, command line and file formats for the knowledge-graph
//! workbench. The computation lives in `workbench-core`; this crate adds
//! the data directory, the HTTP API with its selection-event stream, the
//! demo dataset and the `workbench` binary.

pub mod api;
pub mod cli;
pub mod demo;
pub mod events;
pub mod store;

pub use api::{RunningServer, ServeError};
pub use store::{DataDir, Workspace};
