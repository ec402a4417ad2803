//! Exhaustive helpers: co-complete graph enumeration and the word-by-word
//! path-completeness oracle.

use super::{Edge, LabeledGraph};
use crate::error::{Error, Result};

/// Largest number of graphs [`enumerate_co_complete_graphs`] will produce.
pub const ENUMERATION_CAP: usize = 1 << 20;

/// All graphs in which each `(destination, label)` pair has exactly one
/// incoming edge, i.e. every map from `(node, label)` pairs to source nodes.
///
/// Nodes are named `a`, `b`, `c`, ... The first graph takes node `a` as every
/// source; later graphs count up in base `num_nodes`, with the pair
/// `(first node, label 1)` as the most significant digit.
pub fn enumerate_co_complete_graphs(
    num_nodes: usize,
    num_labels: usize,
) -> Result<Vec<LabeledGraph>> {
    if num_nodes == 0 || num_labels == 0 {
        return Err(Error::InvalidArgument(
            "node and label counts must be positive".into(),
        ));
    }
    let slots = num_nodes
        .checked_mul(num_labels)
        .ok_or_else(|| Error::InvalidArgument("enumeration too large".into()))?;
    let count = u32::try_from(slots)
        .ok()
        .and_then(|s| num_nodes.checked_pow(s))
        .filter(|&c| c <= ENUMERATION_CAP)
        .ok_or_else(|| {
            Error::InvalidArgument(format!(
                "{num_nodes} nodes and {num_labels} labels exceed the cap of {ENUMERATION_CAP} graphs"
            ))
        })?;

    let names: Vec<String> = (0..num_nodes).map(node_name).collect();
    let mut graphs = Vec::with_capacity(count);
    let mut digits = vec![0usize; slots];
    for _ in 0..count {
        let edges = digits
            .iter()
            .enumerate()
            .map(|(slot, &source)| Edge::new(source, slot / num_labels, slot % num_labels + 1))
            .collect();
        graphs.push(LabeledGraph::from_edges(num_labels, names.clone(), edges)?);
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < num_nodes {
                break;
            }
            *d = 0;
        }
    }
    Ok(graphs)
}

fn node_name(i: usize) -> String {
    if i < 26 {
        char::from(b'a' + i as u8).to_string()
    } else {
        format!("n{i}")
    }
}

/// Checks every label word of length `1..=max_len` for a realizing path.
///
/// The answer is conclusive once `max_len ≥ 2^|nodes|`. Graphs with more than
/// 64 nodes are rejected.
pub fn brute_force_path_complete(graph: &LabeledGraph, max_len: usize) -> Result<bool> {
    if max_len < 1 {
        return Err(Error::InvalidArgument("max_len must be at least 1".into()));
    }
    let n = graph.num_nodes();
    if n > 64 {
        return Err(Error::InvalidArgument(
            "brute force supports at most 64 nodes".into(),
        ));
    }
    let m = graph.num_labels();
    // successors[label-1][node] as a bitmask
    let mut successors = vec![vec![0u64; n]; m];
    for e in graph.edges() {
        successors[e.label - 1][e.source] |= 1 << e.destination;
    }
    let start = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    Ok(all_words_realizable(&successors, start, max_len))
}

// Depth-first over the word tree; `ends` holds the possible end nodes of the
// current prefix.
fn all_words_realizable(successors: &[Vec<u64>], ends: u64, remaining: usize) -> bool {
    successors.iter().all(|by_node| {
        let next = (0..by_node.len())
            .filter(|&s| ends & (1 << s) != 0)
            .fold(0u64, |acc, s| acc | by_node[s]);
        next != 0 && (remaining == 1 || all_words_realizable(successors, next, remaining - 1))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::fixtures::*;
    use crate::graphs::is_path_complete;

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_co_complete_graphs(2, 2).unwrap().len(), 16);
        assert_eq!(enumerate_co_complete_graphs(2, 1).unwrap().len(), 4);
        let single = enumerate_co_complete_graphs(1, 3).unwrap();
        assert_eq!(single, vec![g0(3)]);
        assert!(enumerate_co_complete_graphs(5, 5).is_err());
        assert!(enumerate_co_complete_graphs(0, 2).is_err());
    }

    #[test]
    fn enumerated_graphs_are_co_complete_and_distinct() {
        let graphs = enumerate_co_complete_graphs(2, 2).unwrap();
        for (i, g) in graphs.iter().enumerate() {
            assert!(g.is_co_complete());
            assert_eq!(g.edges().len(), 4);
            assert!(graphs[..i].iter().all(|h| h != g));
        }
        assert!(graphs.contains(&g1()));
    }

    #[test]
    fn brute_force_examples() {
        assert!(brute_force_path_complete(&g0(2), 4).unwrap());
        assert!(brute_force_path_complete(&g1(), 4).unwrap());
        let pruned = g1().without_edge("b", "b", 2).unwrap();
        assert!(!brute_force_path_complete(&pruned, 4).unwrap());
        // "2" alone is realizable; "22" is the shortest failure
        assert!(brute_force_path_complete(&pruned, 1).unwrap());
        assert!(brute_force_path_complete(&g1(), 0).is_err());
    }

    #[test]
    fn brute_force_agrees_on_fixtures() {
        for g in [g0(1), g0(2), g1(), g2()] {
            let bound = 1 << g.num_nodes();
            assert_eq!(
                brute_force_path_complete(&g, bound).unwrap(),
                is_path_complete(&g)
            );
        }
    }
}
