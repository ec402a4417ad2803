//! Line-oriented graph format:
//!
//! ```text
//! # comment
//! labels 2
//! node a
//! node b
//! edge a b 1
//! ```

use std::fmt;
use std::str::FromStr;

use super::{Edge, LabeledGraph};
use crate::error::{Error, Result};

impl LabeledGraph {
    /// Parses the text format. Edges are canonicalized on load.
    pub fn parse(text: &str) -> Result<Self> {
        let mut labels: Option<usize> = None;
        let mut nodes: Vec<String> = Vec::new();
        let mut edges: Vec<(usize, &str, &str, &str)> = Vec::new();

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let words: Vec<&str> = content.split_whitespace().collect();
            let err = |message: String| Error::Parse { line, message };
            match words.as_slice() {
                ["labels", m] => {
                    if labels.is_some() {
                        return Err(err("`labels` given twice".into()));
                    }
                    let m: usize = m
                        .parse()
                        .map_err(|_| err(format!("invalid label count `{m}`")))?;
                    if m == 0 {
                        return Err(err("label count must be positive".into()));
                    }
                    labels = Some(m);
                }
                ["node", id] => {
                    if nodes.iter().any(|n| n == id) {
                        return Err(err(format!("duplicate node `{id}`")));
                    }
                    nodes.push(id.to_string());
                }
                ["edge", s, d, l] => edges.push((line, s, d, l)),
                [keyword, ..] => {
                    return Err(err(format!("unrecognized statement `{keyword}`")));
                }
                [] => unreachable!(),
            }
        }

        let num_labels = labels.ok_or(Error::Parse {
            line: text.lines().count().max(1),
            message: "missing `labels` statement".into(),
        })?;
        let mut resolved: Vec<Edge> = Vec::with_capacity(edges.len());
        for (line, s, d, l) in edges {
            let err = |message: String| Error::Parse { line, message };
            let lookup = |name: &str| {
                nodes
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| err(format!("undeclared node `{name}`")))
            };
            let label: usize = l.parse().map_err(|_| err(format!("invalid label `{l}`")))?;
            if label == 0 || label > num_labels {
                return Err(err(format!("label {label} outside 1..={num_labels}")));
            }
            let edge = Edge::new(lookup(s)?, lookup(d)?, label);
            if resolved.contains(&edge) {
                return Err(err(format!("duplicate edge ({s}, {d}, {label})")));
            }
            resolved.push(edge);
        }
        if nodes.is_empty() {
            return Err(Error::Parse {
                line: text.lines().count().max(1),
                message: "graph declares no nodes".into(),
            });
        }
        LabeledGraph::from_edges(num_labels, nodes, resolved)
    }
}

impl FromStr for LabeledGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LabeledGraph::parse(s)
    }
}

impl fmt::Display for LabeledGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "labels {}", self.num_labels())?;
        for n in self.nodes() {
            writeln!(f, "node {n}")?;
        }
        for e in self.edges() {
            writeln!(
                f,
                "edge {} {} {}",
                self.node_name(e.source),
                self.node_name(e.destination),
                e.label
            )?;
        }
        Ok(())
    }
}
