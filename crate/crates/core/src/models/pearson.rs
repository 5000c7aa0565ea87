//! Pearson chi-square goodness-of-fit statistic over dyad states.

use super::{DyadModel, EdgeModel, ModelError};
use crate::graph::{SimpleDigraph, SimpleGraph};

/// States with expected probability below this are left out of the sum.
pub const MIN_EXPECTED: f64 = 1e-12;

/// `Σ_s (o_s − e_s)² / e_s` for one dyad observed in state `observed`.
pub fn dyad_contribution(probs: &[f64], observed: usize) -> f64 {
    probs
        .iter()
        .enumerate()
        .filter(|&(_, &e)| e >= MIN_EXPECTED)
        .map(|(s, &e)| {
            let o = if s == observed { 1.0 } else { 0.0 };
            (o - e) * (o - e) / e
        })
        .sum()
}

/// State index of dyad `{i, j}` in `d`, matching [`DyadModel::dyad_probs`].
pub(crate) fn digraph_state(d: &SimpleDigraph, i: usize, j: usize) -> usize {
    match (d.has_edge(i, j), d.has_edge(j, i)) {
        (false, false) => 0,
        (true, false) => 1,
        (false, true) => 2,
        (true, true) => 3,
    }
}

pub fn gof_statistic_digraph<M: DyadModel>(d: &SimpleDigraph, model: &M) -> Result<f64, ModelError> {
    let n = d.node_count();
    if model.node_count() != n {
        return Err(ModelError::NodeCountMismatch {
            model: model.node_count(),
            network: n,
        });
    }
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            total += dyad_contribution(&model.dyad_probs(i, j), digraph_state(d, i, j));
        }
    }
    Ok(total)
}

pub fn gof_statistic_graph<M: EdgeModel>(g: &SimpleGraph, model: &M) -> Result<f64, ModelError> {
    let n = g.node_count();
    if model.node_count() != n {
        return Err(ModelError::NodeCountMismatch {
            model: model.node_count(),
            network: n,
        });
    }
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let p = model.edge_prob(i, j);
            total += dyad_contribution(&[1.0 - p, p], usize::from(g.has_edge(i, j)));
        }
    }
    Ok(total)
}
