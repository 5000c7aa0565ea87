//! Core decompositions by linear-time bucket peeling.
//!
//! The undirected decomposition peels by degree. The directed decomposition
//! peels by in-degree: removing a node deletes its out-edges, lowering the
//! in-degree of its successors. Both share one Batagelj–Zaversnik routine
//! parameterised by [`Network::core_degree`] and [`Network::peel_targets`].

use serde::Serialize;

use crate::graph::{GraphError, Network, SimpleDigraph, SimpleGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoreMode {
    Undirected,
    DirectedIn,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoreDecomposition {
    pub core_number: Vec<usize>,
    pub degeneracy: usize,
    pub mode: CoreMode,
}

impl CoreDecomposition {
    /// Nodes with core number at least `k`, ascending.
    pub fn k_core_nodes(&self, k: usize) -> Vec<usize> {
        (0..self.core_number.len())
            .filter(|&v| self.core_number[v] >= k)
            .collect()
    }
}

pub fn core_decomposition(g: &SimpleGraph) -> CoreDecomposition {
    peel(g, CoreMode::Undirected)
}

pub fn directed_core_in(d: &SimpleDigraph) -> CoreDecomposition {
    peel(d, CoreMode::DirectedIn)
}

fn peel<N: Network>(g: &N, mode: CoreMode) -> CoreDecomposition {
    let n = g.node_count();
    let mut deg: Vec<usize> = (0..n).map(|v| g.core_degree(v)).collect();
    let max_deg = deg.iter().copied().max().unwrap_or(0);

    // bin[d] = start of the block of nodes with current degree d in `order`
    let mut bin = vec![0usize; max_deg + 2];
    for &d in &deg {
        bin[d + 1] += 1;
    }
    for d in 1..bin.len() {
        bin[d] += bin[d - 1];
    }
    let mut order = vec![0usize; n];
    let mut pos = vec![0usize; n];
    let mut next = bin.clone();
    for v in 0..n {
        pos[v] = next[deg[v]];
        order[pos[v]] = v;
        next[deg[v]] += 1;
    }

    for i in 0..n {
        let v = order[i];
        for u in g.peel_targets(v) {
            if deg[u] > deg[v] {
                let du = deg[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = order[pw];
                if u != w {
                    order[pu] = w;
                    order[pw] = u;
                    pos[u] = pw;
                    pos[w] = pu;
                }
                bin[du] += 1;
                deg[u] -= 1;
            }
        }
    }

    let degeneracy = deg.iter().copied().max().unwrap_or(0);
    CoreDecomposition {
        core_number: deg,
        degeneracy,
        mode,
    }
}

/// Nodes attaining the maximum core number and the subgraph they induce.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerCore<N> {
    pub nodes: Vec<usize>,
    pub subgraph: N,
}

pub fn innermost_core<N: Network>(
    c: &CoreDecomposition,
    g: &N,
) -> Result<InnerCore<N>, GraphError> {
    if g.node_count() == 0 {
        return Err(GraphError::Empty);
    }
    let nodes = c.k_core_nodes(c.degeneracy);
    let subgraph = g.induced_subgraph(&nodes);
    Ok(InnerCore { nodes, subgraph })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankedNode {
    pub index: usize,
    pub label: String,
    pub score: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoreRanking {
    pub entries: Vec<RankedNode>,
    /// Set when fewer than the requested number of nodes were available.
    pub short: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RankingError {
    #[error("ranking size must be at least 1")]
    ZeroK,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Ranks innermost-core nodes by their core degree inside the core subgraph
/// (in-degree for digraphs), descending, ties by label ascending.
pub fn top_k_by_core_degree<N: Network>(
    c: &CoreDecomposition,
    g: &N,
    k: usize,
) -> Result<CoreRanking, RankingError> {
    if k == 0 {
        return Err(RankingError::ZeroK);
    }
    let core = innermost_core(c, g)?;
    let labels = g.labels();
    let mut entries: Vec<RankedNode> = core
        .nodes
        .iter()
        .enumerate()
        .map(|(local, &index)| RankedNode {
            index,
            label: labels[index].clone(),
            score: core.subgraph.core_degree(local),
        })
        .collect();
    entries.sort_by(|a, b| b.score.cmp(&a.score).then_with(|| a.label.cmp(&b.label)));
    let short = k > entries.len();
    entries.truncate(k);
    Ok(CoreRanking { entries, short })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clique(n: usize) -> SimpleGraph {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        SimpleGraph::unlabeled(n, edges).unwrap()
    }

    #[test]
    fn ten_clique_has_core_nine() {
        let c = core_decomposition(&clique(10));
        assert!(c.core_number.iter().all(|&k| k == 9));
        assert_eq!(c.degeneracy, 9);
    }

    #[test]
    fn path_cores_are_one() {
        let g = SimpleGraph::unlabeled(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(core_decomposition(&g).core_number, vec![1, 1, 1]);
    }

    #[test]
    fn directed_cycle_in_cores() {
        let d = SimpleDigraph::unlabeled(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let c = directed_core_in(&d);
        assert_eq!(c.core_number, vec![1, 1, 1]);
        assert_eq!(c.mode, CoreMode::DirectedIn);
    }

    #[test]
    fn in_star_collapses_to_core_zero() {
        // leaves go at k = 1 and take the hub's in-edges with them
        let d = SimpleDigraph::unlabeled(4, [(1, 0), (2, 0), (3, 0)]).unwrap();
        assert_eq!(directed_core_in(&d).core_number, vec![0, 0, 0, 0]);
        let d = SimpleDigraph::unlabeled(4, [(1, 0), (2, 0), (3, 0), (0, 1)]).unwrap();
        assert_eq!(directed_core_in(&d).core_number, vec![1, 1, 0, 0]);
    }

    #[test]
    fn innermost_core_of_triangle() {
        let g = clique(3);
        let c = core_decomposition(&g);
        let core = innermost_core(&c, &g).unwrap();
        assert_eq!(core.nodes, vec![0, 1, 2]);
        assert_eq!(core.subgraph.edge_count(), 3);
    }

    #[test]
    fn innermost_core_of_empty_graph_errors() {
        let g = SimpleGraph::unlabeled(0, []).unwrap();
        let c = core_decomposition(&g);
        assert!(innermost_core(&c, &g).is_err());
    }

    #[test]
    fn ranking_breaks_ties_by_label() {
        // core {x, y, z}, every in-core in-degree is 2; w points into x from
        // outside the core
        let labels = vec!["x".into(), "z".into(), "y".into(), "w".into()];
        let d = SimpleDigraph::from_edges(
            labels,
            [(1, 0), (2, 0), (0, 1), (0, 2), (1, 2), (2, 1), (3, 0)],
        )
        .unwrap();
        let c = directed_core_in(&d);
        assert_eq!(c.degeneracy, 2);
        let r = top_k_by_core_degree(&c, &d, 2).unwrap();
        let names: Vec<_> = r.entries.iter().map(|e| e.label.as_str()).collect();
        assert_eq!(names, ["x", "y"]);
        assert!(!r.short);
        let r = top_k_by_core_degree(&c, &d, 1).unwrap();
        assert_eq!(r.entries[0].label, "x");
    }

    #[test]
    fn ranking_flags_short_core() {
        let g = clique(3);
        let c = core_decomposition(&g);
        let r = top_k_by_core_degree(&c, &g, 5).unwrap();
        assert_eq!(r.entries.len(), 3);
        assert!(r.short);
        assert_eq!(top_k_by_core_degree(&c, &g, 0), Err(RankingError::ZeroK));
    }
}
