//! Authorship as a hypergraph: one hyperedge per paper holding its full
//! author set. Identical author groups on different papers stay separate
//! hyperedges.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::graph::{dot_quote, SimpleGraph};
use crate::ingest::AuthorPaperBipartite;
use crate::kcore::RankedNode;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    labels: Vec<String>,
    edges: Vec<Vec<usize>>,
    edge_names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HyperError {
    #[error("hyperedge {0} is empty")]
    EmptyEdge(usize),
    #[error("hyperedge {0} references node {1} outside 0..{2}")]
    NodeOutOfRange(usize, usize, usize),
    #[error("minimum edge size must be at least 1")]
    ZeroMinSize,
}

impl Hypergraph {
    /// Builds from explicit edges; repeated nodes inside an edge collapse.
    pub fn new(labels: Vec<String>, edges: Vec<Vec<usize>>) -> Result<Self, HyperError> {
        let n = labels.len();
        let mut clean = Vec::with_capacity(edges.len());
        for (e, members) in edges.into_iter().enumerate() {
            let set: BTreeSet<usize> = members.into_iter().collect();
            if set.is_empty() {
                return Err(HyperError::EmptyEdge(e));
            }
            if let Some(&v) = set.iter().find(|&&v| v >= n) {
                return Err(HyperError::NodeOutOfRange(e, v, n));
            }
            clean.push(set.into_iter().collect());
        }
        let edge_names = (0..clean.len()).map(|e| format!("e{e}")).collect();
        Ok(Self {
            labels,
            edges: clean,
            edge_names,
        })
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Hyperedges (sorted node lists), in paper order.
    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge_names(&self) -> &[String] {
        &self.edge_names
    }

    /// Distinct author groups with their multiplicities.
    pub fn distinct_edges(&self) -> BTreeMap<Vec<usize>, usize> {
        let mut out = BTreeMap::new();
        for e in &self.edges {
            *out.entry(e.clone()).or_insert(0) += 1;
        }
        out
    }

    /// Number of hyperedges of each size.
    pub fn size_histogram(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for e in &self.edges {
            *out.entry(e.len()).or_insert(0) += 1;
        }
        out
    }

    /// Bipartite-style DOT: authors as ellipses, hyperedges as small squares.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph H {\n");
        for (i, l) in self.labels.iter().enumerate() {
            out.push_str(&format!("  n{i} [label={}, shape=ellipse];\n", dot_quote(l)));
        }
        for (e, name) in self.edge_names.iter().enumerate() {
            out.push_str(&format!(
                "  h{e} [label={}, shape=square, width=0.15, style=filled, fillcolor=black, fontsize=6];\n",
                dot_quote(name)
            ));
        }
        for (e, members) in self.edges.iter().enumerate() {
            for v in members {
                out.push_str(&format!("  h{e} -- n{v};\n"));
            }
        }
        out.push_str("}\n");
        out
    }
}

pub fn build_hypergraph(b: &AuthorPaperBipartite) -> Hypergraph {
    Hypergraph {
        labels: b.authors().to_vec(),
        edges: b.paper_authors(),
        edge_names: b.papers().to_vec(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HyperDegreeProfile {
    /// `by_size[v][s]` = number of size-`s` hyperedges containing `v`.
    pub by_size: Vec<BTreeMap<usize, usize>>,
    pub total: Vec<usize>,
}

impl HyperDegreeProfile {
    pub fn degree(&self, v: usize, size: usize) -> usize {
        self.by_size[v].get(&size).copied().unwrap_or(0)
    }
}

pub fn hyper_degrees(h: &Hypergraph) -> HyperDegreeProfile {
    let n = h.node_count();
    let mut by_size = vec![BTreeMap::new(); n];
    let mut total = vec![0; n];
    for e in h.edges() {
        for &v in e {
            *by_size[v].entry(e.len()).or_insert(0) += 1;
            total[v] += 1;
        }
    }
    HyperDegreeProfile { by_size, total }
}

/// Authors ranked by the number of hyperedges of size ≥ `min_size` they
/// belong to, descending, ties by label.
pub fn top_k_by_collaborators(
    h: &Hypergraph,
    min_size: usize,
    k: usize,
) -> Result<Vec<RankedNode>, HyperError> {
    if min_size == 0 {
        return Err(HyperError::ZeroMinSize);
    }
    let mut counts = vec![0usize; h.node_count()];
    for e in h.edges().iter().filter(|e| e.len() >= min_size) {
        for &v in e {
            counts[v] += 1;
        }
    }
    let mut ranked: Vec<RankedNode> = counts
        .into_iter()
        .enumerate()
        .map(|(index, score)| RankedNode {
            index,
            label: h.labels[index].clone(),
            score,
        })
        .collect();
    ranked.sort_by(|a, b| b.score.cmp(&a.score).then_with(|| a.label.cmp(&b.label)));
    ranked.truncate(k);
    Ok(ranked)
}

/// Clique expansion: `{i, j}` is an edge iff some hyperedge contains both.
pub fn graph_projection(h: &Hypergraph) -> SimpleGraph {
    let edges = h.edges().iter().flat_map(|e| {
        e.iter()
            .enumerate()
            .flat_map(move |(x, &i)| e[x + 1..].iter().map(move |&j| (i, j)))
    });
    SimpleGraph::from_edges(h.labels.clone(), edges).expect("hyperedges are sets")
}
