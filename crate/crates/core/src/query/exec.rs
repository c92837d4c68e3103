use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::ast::{CompareOp, Direction, Filter, Literal, NodePattern, Pattern, QueryAst};
use super::ResultTable;
use crate::graph::{Node, PropertyGraph, Scalar};

/// Value of `var.attr` on a node. `id`, `name` and `type` resolve to the
/// node's own fields and shadow attributes of the same name.
pub(crate) fn lookup(node: &Node, attr: &str) -> Option<Scalar> {
    match attr {
        "id" => Some(Scalar::String(node.id.clone())),
        "name" => Some(Scalar::String(node.name.clone())),
        "type" => Some(Scalar::String(node.type_label.clone())),
        other => node.attrs.get(other).cloned(),
    }
}

/// Comparison semantics shared by the executor and any reference
/// evaluator: mismatched kinds never match; `CONTAINS` is a
/// case-insensitive substring test on strings.
pub fn compare(value: &Scalar, op: CompareOp, literal: &Literal) -> bool {
    let ord = match (value, literal) {
        (Scalar::String(a), Literal::String(b)) => {
            if op == CompareOp::Contains {
                return a.to_lowercase().contains(&b.to_lowercase());
            }
            a.as_bytes().cmp(b.as_bytes())
        }
        (Scalar::Number(a), Literal::Number(b)) => match a.partial_cmp(b) {
            Some(o) => o,
            None => return false,
        },
        (Scalar::Bool(a), Literal::Bool(b)) => {
            return match op {
                CompareOp::Eq => a == b,
                CompareOp::Ne => a != b,
                _ => false,
            }
        }
        _ => return false,
    };
    match op {
        CompareOp::Eq => ord == Ordering::Equal,
        CompareOp::Ne => ord != Ordering::Equal,
        CompareOp::Lt => ord == Ordering::Less,
        CompareOp::Le => ord != Ordering::Greater,
        CompareOp::Gt => ord == Ordering::Greater,
        CompareOp::Ge => ord != Ordering::Less,
        CompareOp::Contains => false,
    }
}

fn type_ok(node: &Node, pat: &NodePattern) -> bool {
    pat.type_label.as_ref().is_none_or(|t| *t == node.type_label)
}

fn filters_ok(filters: &[Filter], var: &str, node: &Node) -> bool {
    filters
        .iter()
        .filter(|f| f.var == var)
        .all(|f| lookup(node, &f.attr).is_some_and(|v| compare(&v, f.op, &f.value)))
}

/// One match: bound node ids in pattern variable order, plus the edge id
/// (empty for node patterns) to keep ordering total over parallel edges.
struct Binding<'g> {
    nodes: Vec<&'g str>,
    edge: &'g str,
}

pub fn execute(ast: &QueryAst, graph: &PropertyGraph) -> ResultTable {
    let vars = ast.pattern.vars();
    let mut bindings: Vec<Binding<'_>> = Vec::new();
    match &ast.pattern {
        Pattern::Node(pat) => {
            let candidates: alloc::boxed::Box<dyn Iterator<Item = &Node>> = match &pat.type_label {
                Some(t) => alloc::boxed::Box::new(graph.nodes_of_type(t)),
                None => alloc::boxed::Box::new(graph.nodes()),
            };
            for node in candidates {
                if filters_ok(&ast.filters, &pat.var, node) {
                    bindings.push(Binding { nodes: alloc::vec![node.id.as_str()], edge: "" });
                }
            }
        }
        Pattern::Path { src, rel, direction, dst } => {
            let edges: alloc::boxed::Box<dyn Iterator<Item = &crate::graph::Edge>> = match rel {
                Some(r) => alloc::boxed::Box::new(graph.edges_of_rel(r)),
                None => alloc::boxed::Box::new(graph.edges()),
            };
            let same_var = src.var == dst.var;
            for edge in edges {
                let forward = (edge.src.as_str(), edge.dst.as_str());
                let backward = (edge.dst.as_str(), edge.src.as_str());
                let orientations: &[(&str, &str)] = match direction {
                    Direction::Out => &[forward][..],
                    Direction::In => &[backward][..],
                    Direction::Any if edge.src == edge.dst => &[forward][..],
                    Direction::Any => &[forward, backward][..],
                };
                for &(a_id, b_id) in orientations {
                    if same_var && a_id != b_id {
                        continue;
                    }
                    let (Some(a), Some(b)) = (graph.node(a_id), graph.node(b_id)) else {
                        continue;
                    };
                    if !type_ok(a, src) || !type_ok(b, dst) {
                        continue;
                    }
                    if !filters_ok(&ast.filters, &src.var, a) {
                        continue;
                    }
                    if !same_var && !filters_ok(&ast.filters, &dst.var, b) {
                        continue;
                    }
                    let nodes = if same_var {
                        alloc::vec![a.id.as_str()]
                    } else {
                        alloc::vec![a.id.as_str(), b.id.as_str()]
                    };
                    bindings.push(Binding { nodes, edge: edge.id.as_str() });
                }
            }
        }
    }
    bindings.sort_by(|x, y| x.nodes.cmp(&y.nodes).then_with(|| x.edge.cmp(y.edge)));

    let projection: Vec<usize> = ast
        .return_vars
        .iter()
        .map(|v| vars.iter().position(|b| b == v).expect("return var bound by pattern"))
        .collect();
    let total = bindings.len();
    let keep = ast.limit.map_or(total, |l| l.min(total));
    let rows = bindings
        .iter()
        .take(keep)
        .map(|b| projection.iter().map(|&i| b.nodes[i].to_string()).collect())
        .collect();
    ResultTable {
        columns: ast.return_vars.iter().map(String::clone).collect(),
        rows,
        truncated: keep < total,
    }
}
