//! One-hop pattern queries: the query manager every view request lowers to.

mod ast;
mod exec;
mod parser;

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use ast::{CompareOp, Direction, Filter, Literal, NodePattern, Pattern, QueryAst};
pub use exec::{compare, execute};
pub use parser::{parse, validate};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("syntax error at offset {position}: expected {expected}, found {found}")]
    Syntax {
        /// Byte offset into the query text.
        position: usize,
        expected: String,
        found: String,
    },
    #[error("variable {0:?} is not bound by the pattern")]
    UnboundVariable(String),
    #[error("LIMIT must be positive")]
    InvalidLimit,
}

/// Rows hold node ids, one per returned variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Set when more matches existed than `LIMIT` allowed.
    pub truncated: bool,
}

/// Parses and executes in one step.
pub fn run(text: &str, graph: &crate::PropertyGraph) -> Result<ResultTable, QueryError> {
    let ast = parse(text)?;
    Ok(execute(&ast, graph))
}
