//! Loop-free 0/1 networks: undirected [`SimpleGraph`] and directed [`SimpleDigraph`].
//!
//! Both types are immutable once built. Node `i` carries `labels[i]`; edges are
//! stored as sorted adjacency sets so iteration order is deterministic.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("edge ({0}, {1}) references a node outside 0..{2}")]
    NodeOutOfRange(usize, usize, usize),
    #[error("graph has no nodes")]
    Empty,
}

/// Per-dyad state tally of a digraph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DyadCensus {
    pub mutual: usize,
    pub asymmetric: usize,
    pub null: usize,
}

impl DyadCensus {
    pub fn total(&self) -> usize {
        self.mutual + self.asymmetric + self.null
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    labels: Vec<String>,
    adj: Vec<BTreeSet<usize>>,
    edge_count: usize,
}

impl SimpleGraph {
    /// Builds a graph from labels and an edge list. Repeated edges collapse to one.
    pub fn from_edges<I>(labels: Vec<String>, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let n = labels.len();
        let mut adj = vec![BTreeSet::new(); n];
        let mut edge_count = 0;
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::NodeOutOfRange(u, v, n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if adj[u].insert(v) {
                adj[v].insert(u);
                edge_count += 1;
            }
        }
        Ok(Self {
            labels,
            adj,
            edge_count,
        })
    }

    /// Graph whose labels are the decimal node indices.
    pub fn unlabeled<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_edges(index_labels(n), edges)
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj.get(u).is_some_and(|s| s.contains(&v))
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().copied()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(BTreeSet::len).collect()
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, s)| s.range(u + 1..).map(move |&v| (u, v)))
    }

    pub fn induced_subgraph(&self, nodes: &[usize]) -> Self {
        let (map, labels) = reindex(nodes, &self.labels);
        let edges: Vec<_> = self
            .edges()
            .filter_map(|(u, v)| Some((map[u]?, map[v]?)))
            .collect();
        Self::from_edges(labels, edges).expect("induced subgraph of a simple graph is simple")
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for (i, l) in self.labels.iter().enumerate() {
            out.push_str(&format!("  n{i} [label={}];\n", dot_quote(l)));
        }
        for (u, v) in self.edges() {
            out.push_str(&format!("  n{u} -- n{v};\n"));
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleDigraph {
    labels: Vec<String>,
    out: Vec<BTreeSet<usize>>,
    inc: Vec<BTreeSet<usize>>,
    edge_count: usize,
}

impl SimpleDigraph {
    pub fn from_edges<I>(labels: Vec<String>, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let n = labels.len();
        let mut out = vec![BTreeSet::new(); n];
        let mut inc = vec![BTreeSet::new(); n];
        let mut edge_count = 0;
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::NodeOutOfRange(u, v, n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if out[u].insert(v) {
                inc[v].insert(u);
                edge_count += 1;
            }
        }
        Ok(Self {
            labels,
            out,
            inc,
            edge_count,
        })
    }

    pub fn unlabeled<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_edges(index_labels(n), edges)
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out.get(u).is_some_and(|s| s.contains(&v))
    }

    pub fn is_mutual(&self, u: usize, v: usize) -> bool {
        self.has_edge(u, v) && self.has_edge(v, u)
    }

    pub fn successors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.out[v].iter().copied()
    }

    pub fn predecessors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.inc[v].iter().copied()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.inc[v].len()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out[v].len()
    }

    /// `(in-degrees, out-degrees)`.
    pub fn in_out_degrees(&self) -> (Vec<usize>, Vec<usize>) {
        (
            self.inc.iter().map(BTreeSet::len).collect(),
            self.out.iter().map(BTreeSet::len).collect(),
        )
    }

    /// Ordered edges `(source, target)` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, s)| s.iter().map(move |&v| (u, v)))
    }

    /// Unordered dyads `(i, j)`, `i < j`, where both directions are present.
    pub fn mutual_dyads(&self) -> BTreeSet<(usize, usize)> {
        self.edges()
            .filter(|&(u, v)| u < v && self.has_edge(v, u))
            .collect()
    }

    pub fn mutual_count(&self) -> usize {
        self.edges()
            .filter(|&(u, v)| u < v && self.has_edge(v, u))
            .count()
    }

    pub fn dyad_census(&self) -> DyadCensus {
        let n = self.node_count();
        let mutual = self.mutual_count();
        let asymmetric = self.edge_count - 2 * mutual;
        DyadCensus {
            mutual,
            asymmetric,
            null: n * n.saturating_sub(1) / 2 - mutual - asymmetric,
        }
    }

    pub fn induced_subgraph(&self, nodes: &[usize]) -> Self {
        let (map, labels) = reindex(nodes, &self.labels);
        let edges: Vec<_> = self
            .edges()
            .filter_map(|(u, v)| Some((map[u]?, map[v]?)))
            .collect();
        Self::from_edges(labels, edges).expect("induced subgraph of a simple digraph is simple")
    }

    /// Underlying undirected graph (an edge wherever either direction exists).
    pub fn to_undirected(&self) -> SimpleGraph {
        SimpleGraph::from_edges(self.labels.clone(), self.edges())
            .expect("digraph has no loops")
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph G {\n");
        for (i, l) in self.labels.iter().enumerate() {
            out.push_str(&format!("  n{i} [label={}];\n", dot_quote(l)));
        }
        for (u, v) in self.edges() {
            out.push_str(&format!("  n{u} -> n{v};\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// Operations shared by both network kinds: weak connectivity, induced
/// subgraphs, and the degree notion used by core peeling.
pub trait Network: Sized {
    fn node_count(&self) -> usize;
    fn labels(&self) -> &[String];
    fn induced_subgraph(&self, nodes: &[usize]) -> Self;
    /// Neighbours ignoring edge direction.
    fn weak_neighbors(&self, v: usize) -> Vec<usize>;
    /// Degree used for core peeling and core rankings (in-degree for digraphs).
    fn core_degree(&self, v: usize) -> usize;
    /// Nodes whose core degree drops by one when `v` is removed.
    fn peel_targets(&self, v: usize) -> Vec<usize>;
}

impl Network for SimpleGraph {
    fn node_count(&self) -> usize {
        self.node_count()
    }
    fn labels(&self) -> &[String] {
        self.labels()
    }
    fn induced_subgraph(&self, nodes: &[usize]) -> Self {
        self.induced_subgraph(nodes)
    }
    fn weak_neighbors(&self, v: usize) -> Vec<usize> {
        self.neighbors(v).collect()
    }
    fn core_degree(&self, v: usize) -> usize {
        self.degree(v)
    }
    fn peel_targets(&self, v: usize) -> Vec<usize> {
        self.neighbors(v).collect()
    }
}

impl Network for SimpleDigraph {
    fn node_count(&self) -> usize {
        self.node_count()
    }
    fn labels(&self) -> &[String] {
        self.labels()
    }
    fn induced_subgraph(&self, nodes: &[usize]) -> Self {
        self.induced_subgraph(nodes)
    }
    fn weak_neighbors(&self, v: usize) -> Vec<usize> {
        let set: BTreeSet<usize> = self.out[v].union(&self.inc[v]).copied().collect();
        set.into_iter().collect()
    }
    fn core_degree(&self, v: usize) -> usize {
        self.in_degree(v)
    }
    fn peel_targets(&self, v: usize) -> Vec<usize> {
        self.successors(v).collect()
    }
}

/// Weakly connected components, each sorted ascending, listed in order of
/// their smallest node.
pub fn connected_components<N: Network>(g: &N) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for w in g.weak_neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

/// Induced subgraph on the largest (weakly) connected component. Ties go to
/// the component containing the smallest node index.
pub fn largest_connected_component<N: Network>(g: &N) -> Result<N, GraphError> {
    let comps = connected_components(g);
    let mut best: Option<&Vec<usize>> = None;
    for c in &comps {
        if best.is_none_or(|b| c.len() > b.len()) {
            best = Some(c);
        }
    }
    let best = best.ok_or(GraphError::Empty)?;
    Ok(g.induced_subgraph(best))
}

pub(crate) fn index_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn reindex(nodes: &[usize], labels: &[String]) -> (Vec<Option<usize>>, Vec<String>) {
    let mut sorted: Vec<usize> = nodes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut map = vec![None; labels.len()];
    let mut new_labels = Vec::with_capacity(sorted.len());
    for (k, &v) in sorted.iter().enumerate() {
        map[v] = Some(k);
        new_labels.push(labels[v].clone());
    }
    (map, new_labels)
}

pub(crate) fn dot_quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for c in s.chars() {
        match c {
            '"' => q.push_str("\\\""),
            '\\' => q.push_str("\\\\"),
            '\n' => q.push_str("\\n"),
            _ => q.push(c),
        }
    }
    q.push('"');
    q
}
