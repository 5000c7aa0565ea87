//! Dyad-independence models for simple networks: the β model for undirected
//! graphs and the p1 model for digraphs, both fitted by maximum likelihood.

mod beta;
mod face;
mod p1;
mod pearson;

use serde::Serialize;
use thiserror::Error;

pub use beta::{beta_edge_probs, degree_sequence_is_interior, fit_beta, BetaParams, EdgeProbabilities};
pub use p1::{dyad_probs, fit_p1, DyadProbabilities, P1Params, Reciprocity, Rho};
pub use pearson::{dyad_contribution, gof_statistic_digraph, gof_statistic_graph, MIN_EXPECTED};

/// Natural parameters beyond this magnitude are treated as divergent.
pub const PARAM_CAP: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitStatus {
    Converged,
    /// Iteration budget exhausted before the moment residual fell below tolerance.
    MaxIterations,
    /// Observed statistics lie on the boundary of their polytope, so the MLE
    /// does not exist. β fits report capped approximations. p1 fits report
    /// the extended MLE, which puts zero probability on the dyad states
    /// listed in `P1Params::restricted`.
    Nonexistent,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("model needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("model has {model} nodes but the network has {network}")]
    NodeCountMismatch { model: usize, network: usize },
}

/// Probabilities of the four dyad states of `{i, j}`:
/// `[null, i→j only, j→i only, mutual]`.
pub trait DyadModel {
    fn node_count(&self) -> usize;
    fn dyad_probs(&self, i: usize, j: usize) -> [f64; 4];
}

/// Edge probabilities of an undirected dyad-independence model.
pub trait EdgeModel {
    fn node_count(&self) -> usize;
    fn edge_prob(&self, i: usize, j: usize) -> f64;
}

#[inline]
pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}


#[inline]
pub(crate) fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

pub(crate) fn check_tolerance(tol: f64) -> Result<(), ModelError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(ModelError::BadTolerance(tol))
    }
}

/// Outcome of solving `Σ_j σ(x + κ_j) = target` for `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum LogisticSolve {
    Root(f64),
    /// Target is 0: the root is at −∞.
    Lower,
    /// Target equals the number of terms: the root is at +∞.
    Upper,
    /// No terms; any `x` satisfies the (empty) equation.
    Free,
}

pub(crate) fn solve_logistic_sum(kappa: &[f64], target: f64, start: f64) -> LogisticSolve {
    let m = kappa.len() as f64;
    if kappa.is_empty() {
        return LogisticSolve::Free;
    }
    let eps = 1e-12;
    if target <= eps {
        return LogisticSolve::Lower;
    }
    if target >= m - eps {
        return LogisticSolve::Upper;
    }
    let f = |x: f64| -> (f64, f64) {
        let mut s = 0.0;
        let mut ds = 0.0;
        for &k in kappa {
            let p = sigmoid(x + k);
            s += p;
            ds += p * (1.0 - p);
        }
        (s - target, ds)
    };
    // bracket the root
    let mut lo = start;
    let mut hi = start;
    let mut step = 1.0;
    while f(lo).0 > 0.0 {
        lo -= step;
        step *= 2.0;
    }
    step = 1.0;
    while f(hi).0 < 0.0 {
        hi += step;
        step *= 2.0;
    }
    let mut x = start.clamp(lo, hi);
    for _ in 0..200 {
        let (fx, dfx) = f(x);
        if fx.abs() <= 1e-14 * target.max(1.0) {
            break;
        }
        if fx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let newton = x - fx / dfx;
        x = if dfx > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 1e-15 * (1.0 + x.abs()) {
            break;
        }
    }
    LogisticSolve::Root(x)
}

/// Index of the unordered dyad `{i, j}` (`i < j`) in row-major upper-triangle order.
#[inline]
pub(crate) fn dyad_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}
