//! Labeled directed multigraphs over the mode alphabet `{1..M}`.
//!
//! A graph is the combinatorial template of a multiple Lyapunov function:
//! each node carries one function, and an edge `(s, d, σ)` stands for the
//! inequality `V_d(A_σ x) ≤ V_s(x)`.
//!
//! Nodes keep their declaration order. Edges are kept sorted by source node,
//! then destination node, then label, with nodes compared by declaration
//! index. Every matrix derived from a graph (selector matrices, certificates)
//! uses this order.

mod enumerate;
mod observer;
mod text;

pub use enumerate::{brute_force_path_complete, enumerate_co_complete_graphs, ENUMERATION_CAP};
pub use observer::{build_observer, is_path_complete, NodeSet, ObserverEdge, ObserverGraph};

use crate::error::{Error, Result};

/// One labeled edge, referring to nodes by declaration index. Labels are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub source: usize,
    pub destination: usize,
    pub label: usize,
}

impl Edge {
    pub fn new(source: usize, destination: usize, label: usize) -> Self {
        Edge {
            source,
            destination,
            label,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    num_labels: usize,
    nodes: Vec<String>,
    edges: Vec<Edge>,
}

impl LabeledGraph {
    /// Builds a graph from node names and `(source, destination, label)` triples.
    pub fn new<S: AsRef<str>>(
        num_labels: usize,
        nodes: &[S],
        edges: &[(S, S, usize)],
    ) -> Result<Self> {
        let nodes: Vec<String> = nodes.iter().map(|n| n.as_ref().to_string()).collect();
        let lookup = |name: &str| {
            nodes
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::InvalidGraph(format!("undeclared node `{name}`")))
        };
        let indexed = edges
            .iter()
            .map(|(s, d, l)| Ok(Edge::new(lookup(s.as_ref())?, lookup(d.as_ref())?, *l)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_edges(num_labels, nodes, indexed)
    }

    /// Builds a graph from node names and index-based edges, validating and
    /// sorting the edge list into canonical order.
    pub fn from_edges(num_labels: usize, nodes: Vec<String>, mut edges: Vec<Edge>) -> Result<Self> {
        if num_labels == 0 {
            return Err(Error::InvalidGraph("at least one label is required".into()));
        }
        if nodes.is_empty() {
            return Err(Error::InvalidGraph("at least one node is required".into()));
        }
        for (i, name) in nodes.iter().enumerate() {
            validate_identifier(name)?;
            if nodes[..i].contains(name) {
                return Err(Error::InvalidGraph(format!("duplicate node `{name}`")));
            }
        }
        for e in &edges {
            if e.source >= nodes.len() || e.destination >= nodes.len() {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}, {}) refers to an undeclared node",
                    e.source, e.destination, e.label
                )));
            }
            if e.label == 0 || e.label > num_labels {
                return Err(Error::InvalidLabel {
                    label: e.label,
                    max: num_labels,
                });
            }
        }
        edges.sort();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!(
                "duplicate edge ({}, {}, {})",
                nodes[w[0].source], nodes[w[0].destination], w[0].label
            )));
        }
        Ok(LabeledGraph {
            num_labels,
            nodes,
            edges,
        })
    }

    /// The single-node graph with one self-loop per label: a common Lyapunov function.
    pub fn common(num_labels: usize) -> Result<Self> {
        let edges = (1..=num_labels).map(|l| Edge::new(0, 0, l)).collect();
        Self::from_edges(num_labels, vec!["a".to_string()], edges)
    }

    pub fn num_labels(&self) -> usize {
        self.num_labels
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_name(&self, index: usize) -> &str {
        &self.nodes[index]
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name)
    }

    /// Edges in canonical order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edges carrying `label`, in canonical order.
    pub fn edges_with_label(&self, label: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter().filter(move |e| e.label == label)
    }

    pub fn contains_edge(&self, source: usize, destination: usize, label: usize) -> bool {
        self.edges
            .binary_search(&Edge::new(source, destination, label))
            .is_ok()
    }

    /// Returns a copy of the graph with the named edge removed.
    pub fn without_edge(&self, source: &str, destination: &str, label: usize) -> Result<Self> {
        let (s, d) = match (self.node_index(source), self.node_index(destination)) {
            (Some(s), Some(d)) => (s, d),
            _ => {
                return Err(Error::InvalidGraph(format!(
                    "no node `{source}` or `{destination}`"
                )))
            }
        };
        let target = Edge::new(s, d, label);
        if !self.edges.contains(&target) {
            return Err(Error::InvalidGraph(format!(
                "no edge ({source}, {destination}, {label})"
            )));
        }
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|e| *e != target)
            .collect();
        Self::from_edges(self.num_labels, self.nodes.clone(), edges)
    }

    /// Every node has, for every label, at least one outgoing edge with that label.
    pub fn is_complete(&self) -> bool {
        self.covers_all(|e| e.source)
    }

    /// Every node has, for every label, at least one incoming edge with that label.
    pub fn is_co_complete(&self) -> bool {
        self.covers_all(|e| e.destination)
    }

    fn covers_all(&self, endpoint: impl Fn(&Edge) -> usize) -> bool {
        let m = self.num_labels;
        let mut seen = vec![false; self.nodes.len() * m];
        for e in &self.edges {
            seen[endpoint(e) * m + (e.label - 1)] = true;
        }
        seen.into_iter().all(|b| b)
    }
}

fn validate_identifier(name: &str) -> Result<()> {
    if name.is_empty() || name.chars().any(|c| c.is_whitespace() || c == '#') {
        return Err(Error::InvalidGraph(format!(
            "invalid node identifier `{name}`"
        )));
    }
    Ok(())
}
