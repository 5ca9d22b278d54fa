//! Line-oriented graph text format.
//!
//! ```text
//! # comment
//! nodes: a,b,c
//! a -> b
//! b -- c
//! ```
//!
//! The `nodes:` line comes first. Edge lines use `->` for directed and `--`
//! for undirected edges; the latter only appear in partially directed
//! graphs. Reading is order-insensitive; writing emits directed edges then
//! undirected edges, each sorted by label.

use std::fmt::Write as _;

use crate::equivalence::Pdag;
use crate::error::{Error, Result};
use crate::graph::{Dag, NodeId, NodeOrder, NodeSet};

/// Parsed contents of a graph file.
#[derive(Debug, Clone)]
pub struct GraphText {
    pub nodes: NodeSet,
    pub directed: Vec<(NodeId, NodeId)>,
    pub undirected: Vec<(NodeId, NodeId)>,
}

fn content(line: &str) -> &str {
    match line.find('#') {
        Some(i) => line[..i].trim(),
        None => line.trim(),
    }
}

pub fn parse_graph(text: &str) -> Result<GraphText> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, content(l)))
        .filter(|(_, l)| !l.is_empty());

    let (first_no, first) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing `nodes:` line".into(),
    })?;
    let list = first.strip_prefix("nodes:").ok_or_else(|| Error::Parse {
        line: first_no,
        message: "first line must be `nodes: a,b,...`".into(),
    })?;
    let labels: Vec<&str> = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    let nodes = NodeSet::new(labels).map_err(|e| Error::Parse {
        line: first_no,
        message: e.to_string(),
    })?;

    let mut directed = Vec::new();
    let mut undirected = Vec::new();
    for (no, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let [a, op, b] = toks[..] else {
            return Err(Error::Parse {
                line: no,
                message: format!("expected `u -> v` or `u -- v`, got `{line}`"),
            });
        };
        let id = |l: &str| {
            nodes.id(l).map_err(|e| Error::Parse {
                line: no,
                message: e.to_string(),
            })
        };
        let (a, b) = (id(a)?, id(b)?);
        if a == b {
            return Err(Error::Parse {
                line: no,
                message: format!("self-loop on `{}`", nodes.label(a)),
            });
        }
        match op {
            "->" => directed.push((a, b)),
            "--" => undirected.push((a.min(b), a.max(b))),
            _ => {
                return Err(Error::Parse {
                    line: no,
                    message: format!("unknown edge operator `{op}`"),
                })
            }
        }
    }
    directed.sort_unstable();
    directed.dedup();
    undirected.sort_unstable();
    undirected.dedup();
    Ok(GraphText {
        nodes,
        directed,
        undirected,
    })
}

pub fn parse_dag(text: &str) -> Result<Dag> {
    let g = parse_graph(text)?;
    if let Some(&(a, b)) = g.undirected.first() {
        return Err(Error::input(format!(
            "undirected edge {} -- {} in a DAG file",
            g.nodes.label(a),
            g.nodes.label(b)
        )));
    }
    Dag::new(g.nodes, g.directed)
}

pub fn parse_pdag(text: &str) -> Result<Pdag> {
    let g = parse_graph(text)?;
    Pdag::new(g.nodes, g.directed, g.undirected)
}

fn write_header(out: &mut String, nodes: &NodeSet) {
    let _ = writeln!(out, "nodes: {}", nodes.labels().join(","));
}

pub fn write_dag(g: &Dag) -> String {
    let mut out = String::new();
    write_header(&mut out, g.nodes());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{} -> {}", g.nodes().label(u), g.nodes().label(v));
    }
    out
}

pub fn write_pdag(p: &Pdag) -> String {
    let mut out = String::new();
    let nodes = p.nodes();
    write_header(&mut out, nodes);
    for &(u, v) in p.directed() {
        let _ = writeln!(out, "{} -> {}", nodes.label(u), nodes.label(v));
    }
    for &(a, b) in p.undirected() {
        let _ = writeln!(out, "{} -- {}", nodes.label(a), nodes.label(b));
    }
    out
}

/// One label per line; blank lines and `#` comments ignored.
pub fn parse_ordering(text: &str, nodes: &NodeSet) -> Result<NodeOrder> {
    let labels: Vec<&str> = text.lines().map(content).filter(|l| !l.is_empty()).collect();
    NodeOrder::from_labels(nodes, labels)
}

pub fn write_ordering(order: &NodeOrder, nodes: &NodeSet) -> String {
    let mut out = String::new();
    for l in order.labels(nodes) {
        out.push_str(&l);
        out.push('\n');
    }
    out
}
