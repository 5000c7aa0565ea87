use serde::Serialize;

use super::{
    check_tolerance, sigmoid, EdgeModel, FitStatus, ModelError, PARAM_CAP,
};
use crate::graph::SimpleGraph;

/// Fitted β model: `P(i ~ j) = σ(β_i + β_j)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaParams {
    pub labels: Vec<String>,
    pub beta: Vec<f64>,
    pub status: FitStatus,
    pub iterations: usize,
    /// Largest `|E[d_i] − d_i|` at the returned parameters.
    pub max_residual: f64,
}

impl BetaParams {
    pub fn converged(&self) -> bool {
        self.status == FitStatus::Converged
    }

    pub fn expected_degrees(&self) -> Vec<f64> {
        expected_degrees(&self.beta)
    }
}

impl EdgeModel for BetaParams {
    fn node_count(&self) -> usize {
        self.beta.len()
    }

    fn edge_prob(&self, i: usize, j: usize) -> f64 {
        sigmoid(self.beta[i] + self.beta[j])
    }
}

/// Dense symmetric edge-probability matrix with a zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeProbabilities {
    pub n: usize,
    pub p: Vec<f64>,
}

impl EdgeProbabilities {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.p[i * self.n + j]
    }
}

impl EdgeModel for EdgeProbabilities {
    fn node_count(&self) -> usize {
        self.n
    }

    fn edge_prob(&self, i: usize, j: usize) -> f64 {
        self.get(i, j)
    }
}

pub fn beta_edge_probs(b: &BetaParams) -> EdgeProbabilities {
    let n = b.beta.len();
    let mut p = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let q = b.edge_prob(i, j);
            p[i * n + j] = q;
            p[j * n + i] = q;
        }
    }
    EdgeProbabilities { n, p }
}

fn expected_degrees(beta: &[f64]) -> Vec<f64> {
    let n = beta.len();
    let mut e = vec![0.0; n];
    for i in 0..n {
        for j in i + 1..n {
            let p = sigmoid(beta[i] + beta[j]);
            e[i] += p;
            e[j] += p;
        }
    }
    e
}

/// Whether `degrees` lies strictly inside the polytope of degree sequences,
/// i.e. `Σ_S d − Σ_T d < |S|(n − 1 − |T|)` for all disjoint `S`, `T` not both
/// empty. The β-model MLE exists exactly for such sequences.
pub fn degree_sequence_is_interior(degrees: &[usize]) -> bool {
    let n = degrees.len();
    if n < 2 {
        return false;
    }
    let mut d: Vec<i64> = degrees.iter().map(|&x| x as i64).collect();
    d.sort_unstable_by(|a, b| b.cmp(a));
    let mut top = vec![0i64; n + 1];
    for i in 0..n {
        top[i + 1] = top[i] + d[i];
    }
    let mut bottom = vec![0i64; n + 1];
    for i in 0..n {
        bottom[i + 1] = bottom[i] + d[n - 1 - i];
    }
    let n = n as i64;
    for s in 0..=n {
        for t in 0..=(n - s) {
            if s == 0 && t == 0 {
                continue;
            }
            let lhs = top[s as usize] - bottom[t as usize];
            if lhs >= s * (n - 1 - t) {
                return false;
            }
        }
    }
    true
}

/// Fits the β model by the fixed-point iteration
/// `β_i ← ln d_i − ln Σ_{j≠i} 1 / (e^{−β_j} + e^{β_i})`
/// until the largest degree residual drops below `tol`.
///
/// Boundary degree sequences never produce an error: the iteration runs with
/// parameters clamped to `±PARAM_CAP` and the result is flagged
/// [`FitStatus::Nonexistent`].
pub fn fit_beta(g: &SimpleGraph, tol: f64, max_iter: usize) -> Result<BetaParams, ModelError> {
    let n = g.node_count();
    if n < 2 {
        return Err(ModelError::TooFewNodes(n));
    }
    check_tolerance(tol)?;
    let degrees = g.degrees();
    let interior = degree_sequence_is_interior(&degrees);
    let dmax = (n - 1) as f64;

    let mut beta: Vec<f64> = degrees
        .iter()
        .map(|&d| {
            let q = (d as f64 + 0.5) / (dmax + 1.0);
            0.5 * (q / (1.0 - q)).ln()
        })
        .collect();
    let mut next = vec![0.0; n];
    let mut iterations = 0;
    let mut residual = max_residual(&beta, &degrees);
    while residual >= tol && iterations < max_iter {
        let exp_neg: Vec<f64> = beta.iter().map(|b| (-b).exp()).collect();
        for i in 0..n {
            if degrees[i] == 0 {
                next[i] = -PARAM_CAP;
                continue;
            }
            let ebi = beta[i].exp();
            let s: f64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| 1.0 / (exp_neg[j] + ebi))
                .sum();
            next[i] = ((degrees[i] as f64).ln() - s.ln()).clamp(-PARAM_CAP, PARAM_CAP);
        }
        std::mem::swap(&mut beta, &mut next);
        iterations += 1;
        residual = max_residual(&beta, &degrees);
    }

    let capped = beta.iter().any(|b| b.abs() >= PARAM_CAP);
    let status = if !interior || capped {
        FitStatus::Nonexistent
    } else if residual < tol {
        FitStatus::Converged
    } else {
        FitStatus::MaxIterations
    };
    Ok(BetaParams {
        labels: g.labels().to_vec(),
        beta,
        status,
        iterations,
        max_residual: residual,
    })
}

fn max_residual(beta: &[f64], degrees: &[usize]) -> f64 {
    expected_degrees(beta)
        .iter()
        .zip(degrees)
        .map(|(e, &d)| (e - d as f64).abs())
        .fold(0.0, f64::max)
}
