//! Observer (subset) construction and the path-completeness decision.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use super::{Edge, LabeledGraph};

/// A nonempty set of base-graph nodes, stored as sorted declaration indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeSet(Vec<usize>);

impl NodeSet {
    pub fn new(mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        NodeSet(members)
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, node: usize) -> bool {
        self.0.binary_search(&node).is_ok()
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.0.iter().all(|n| other.contains(*n))
    }

    /// Renders the set as `{a,b}` using the base graph's node names.
    pub fn display<'a>(&'a self, graph: &'a LabeledGraph) -> impl fmt::Display + 'a {
        DisplaySet(self, graph)
    }
}

struct DisplaySet<'a>(&'a NodeSet, &'a LabeledGraph);

impl fmt::Display for DisplaySet<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, n) in self.0.members().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(self.1.node_name(*n))?;
        }
        f.write_str("}")
    }
}

/// Observer edge between observer nodes, referred to by index into
/// [`ObserverGraph::nodes`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ObserverEdge {
    pub from: usize,
    pub to: usize,
    pub label: usize,
}

#[derive(Clone, Debug)]
pub struct ObserverGraph {
    base: LabeledGraph,
    nodes: Vec<NodeSet>,
    edges: Vec<ObserverEdge>,
}

impl ObserverGraph {
    pub fn base(&self) -> &LabeledGraph {
        &self.base
    }

    /// Observer nodes in discovery order; the first one is the full node set.
    pub fn nodes(&self) -> &[NodeSet] {
        &self.nodes
    }

    pub fn edges(&self) -> &[ObserverEdge] {
        &self.edges
    }

    /// Follows `word` from the full node set. Returns `None` as soon as the
    /// successor set becomes empty.
    pub fn run(&self, word: &[usize]) -> Option<usize> {
        let mut current = 0;
        for &label in word {
            current = self
                .edges
                .iter()
                .find(|e| e.from == current && e.label == label)?
                .to;
        }
        Some(current)
    }

    /// Every observer node has an outgoing edge for every label.
    pub fn is_complete(&self) -> bool {
        let m = self.base.num_labels();
        let mut seen = vec![false; self.nodes.len() * m];
        for e in &self.edges {
            seen[e.from * m + e.label - 1] = true;
        }
        seen.into_iter().all(|b| b)
    }

    /// The observer as an ordinary labeled graph whose node names are `{a,b}`-style sets.
    pub fn to_graph(&self) -> LabeledGraph {
        let names = self
            .nodes
            .iter()
            .map(|s| s.display(&self.base).to_string())
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|e| Edge::new(e.from, e.to, e.label))
            .collect();
        LabeledGraph::from_edges(self.base.num_labels(), names, edges)
            .expect("observer edges are unique and well-formed")
    }
}

/// Subset construction starting from the full node set. Discovery is
/// breadth-first with labels processed in ascending order; empty successor
/// sets produce no node and no edge.
pub fn build_observer(graph: &LabeledGraph) -> ObserverGraph {
    let full = NodeSet::new((0..graph.num_nodes()).collect());
    let mut index: HashMap<NodeSet, usize> = HashMap::new();
    let mut nodes = vec![full.clone()];
    index.insert(full, 0);
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);

    while let Some(p) = queue.pop_front() {
        for label in 1..=graph.num_labels() {
            let succ: Vec<usize> = graph
                .edges_with_label(label)
                .filter(|e| nodes[p].contains(e.source))
                .map(|e| e.destination)
                .collect();
            if succ.is_empty() {
                continue;
            }
            let q = NodeSet::new(succ);
            let to = match index.get(&q) {
                Some(&i) => i,
                None => {
                    nodes.push(q.clone());
                    index.insert(q, nodes.len() - 1);
                    queue.push_back(nodes.len() - 1);
                    nodes.len() - 1
                }
            };
            edges.push(ObserverEdge { from: p, to, label });
        }
    }

    ObserverGraph {
        base: graph.clone(),
        nodes,
        edges,
    }
}

/// Every finite label word is realized by a path, decided by completeness of the observer.
pub fn is_path_complete(graph: &LabeledGraph) -> bool {
    build_observer(graph).is_complete()
}
