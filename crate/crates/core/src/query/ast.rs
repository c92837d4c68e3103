use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodePattern {
    pub var: String,
    pub type_label: Option<String>,
}

/// Edge orientation relative to the pattern's left node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `(a)-[]->(b)`: edge runs a to b.
    Out,
    /// `(a)<-[]-(b)`: edge runs b to a.
    In,
    /// `(a)-[]-(b)`: either orientation.
    Any,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Pattern {
    Node(NodePattern),
    Path {
        src: NodePattern,
        rel: Option<String>,
        direction: Direction,
        dst: NodePattern,
    },
}

impl Pattern {
    /// Distinct variables in binding order.
    pub fn vars(&self) -> Vec<&str> {
        match self {
            Pattern::Node(n) => alloc::vec![n.var.as_str()],
            Pattern::Path { src, dst, .. } if src.var == dst.var => alloc::vec![src.var.as_str()],
            Pattern::Path { src, dst, .. } => alloc::vec![src.var.as_str(), dst.var.as_str()],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CompareOp {
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "CONTAINS")]
    Contains,
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Eq => "=",
            CompareOp::Ne => "!=",
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
            CompareOp::Contains => "CONTAINS",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Literal {
    Bool(bool),
    Number(f64),
    String(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Filter {
    pub var: String,
    pub attr: String,
    pub op: CompareOp,
    pub value: Literal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryAst {
    pub pattern: Pattern,
    pub filters: Vec<Filter>,
    pub return_vars: Vec<String>,
    pub limit: Option<usize>,
}

pub(crate) const KEYWORDS: [&str; 8] =
    ["MATCH", "WHERE", "AND", "RETURN", "LIMIT", "CONTAINS", "TRUE", "FALSE"];

pub(crate) fn is_plain_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !KEYWORDS.iter().any(|k| k.eq_ignore_ascii_case(s))
}

struct Ident<'a>(&'a str);

impl fmt::Display for Ident<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if is_plain_ident(self.0) {
            f.write_str(self.0)
        } else {
            f.write_str("`")?;
            for c in self.0.chars() {
                if c == '`' {
                    f.write_str("``")?;
                } else {
                    write!(f, "{c}")?;
                }
            }
            f.write_str("`")
        }
    }
}

impl fmt::Display for NodePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", Ident(&self.var))?;
        if let Some(t) = &self.type_label {
            write!(f, ":{}", Ident(t))?;
        }
        f.write_str(")")
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Bool(b) => write!(f, "{b}"),
            Literal::Number(v) => write!(f, "{v}"),
            Literal::String(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\t' => f.write_str("\\t")?,
                        '\r' => f.write_str("\\r")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
        }
    }
}

impl fmt::Display for QueryAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("MATCH ")?;
        match &self.pattern {
            Pattern::Node(n) => write!(f, "{n}")?,
            Pattern::Path { src, rel, direction, dst } => {
                let rel = |f: &mut fmt::Formatter<'_>| match rel {
                    Some(r) => write!(f, "[:{}]", Ident(r)),
                    None => f.write_str("[]"),
                };
                write!(f, "{src}")?;
                match direction {
                    Direction::Out => {
                        f.write_str("-")?;
                        rel(f)?;
                        f.write_str("->")?;
                    }
                    Direction::In => {
                        f.write_str("<-")?;
                        rel(f)?;
                        f.write_str("-")?;
                    }
                    Direction::Any => {
                        f.write_str("-")?;
                        rel(f)?;
                        f.write_str("-")?;
                    }
                }
                write!(f, "{dst}")?;
            }
        }
        for (i, flt) in self.filters.iter().enumerate() {
            f.write_str(if i == 0 { " WHERE " } else { " AND " })?;
            write!(
                f,
                "{}.{} {} {}",
                Ident(&flt.var),
                Ident(&flt.attr),
                flt.op.symbol(),
                flt.value
            )?;
        }
        f.write_str(" RETURN ")?;
        for (i, v) in self.return_vars.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", Ident(v))?;
        }
        if let Some(limit) = self.limit {
            write!(f, " LIMIT {limit}")?;
        }
        Ok(())
    }
}
