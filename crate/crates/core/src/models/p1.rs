//! The p1 model in its dyadic log-linear form.
//!
//! For a dyad `{i, j}` the unnormalised log-weights of the four states are
//!
//! ```text
//! null   0
//! i→j    θ + α_i + β_j
//! j→i    θ + α_j + β_i
//! i↔j    (θ + α_i + β_j) + (θ + α_j + β_i) + ρ_ij
//! ```
//!
//! with `ρ_ij = 0`, a shared constant `ρ`, or a free per-dyad value. A free
//! per-dyad reciprocity parameter has each dyad's mutual indicator as its
//! sufficient statistic, so its MLE sits at `+∞` for observed mutual dyads
//! and `−∞` elsewhere; [`Rho::Dyadic`] stores that limit as the mutual set.
//!
//! Fitting is iterative proportional fitting: each sweep matches, in turn,
//! every out-degree margin, every in-degree margin and (for constant ρ) the
//! mutual-count margin exactly, holding the other parameters fixed. The
//! gauge `Σα = Σβ = 0` is restored after every sweep by moving the means
//! into θ.
//!
//! Observed statistics on the boundary of their polytope have no MLE. The
//! fit then targets the extended MLE: dyad states outside the facial set are
//! given probability zero (recorded in [`P1Params::restricted`]) and IPF runs
//! on the remaining states, where the observed margins are interior.

use std::collections::BTreeSet;

use serde::Serialize;

use super::face::{facial_set, Allowed, Margins};
use super::{
    check_tolerance, dyad_index, log_add_exp, solve_logistic_sum, DyadModel, FitStatus,
    LogisticSolve, ModelError, PARAM_CAP,
};
use crate::graph::SimpleDigraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reciprocity {
    Zero,
    Constant,
    Dyadic,
}

impl std::str::FromStr for Reciprocity {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zero" | "rho-zero" => Ok(Self::Zero),
            "constant" | "rho-constant" => Ok(Self::Constant),
            "dyadic" | "rho-dyadic" => Ok(Self::Dyadic),
            _ => Err(format!("unknown reciprocity variant {s:?} (zero|constant|dyadic)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rho {
    Zero,
    Constant(f64),
    /// `ρ_ij = +∞` for the listed dyads (`i < j`), `−∞` for all others.
    Dyadic { mutual: BTreeSet<(usize, usize)> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct P1Params {
    pub labels: Vec<String>,
    pub variant: Reciprocity,
    pub theta: f64,
    /// Expansiveness (sender effects).
    pub alpha: Vec<f64>,
    /// Attractiveness (receiver effects).
    pub beta: Vec<f64>,
    pub rho: Rho,
    /// Dyads `i < j` confined to some of their states by boundary
    /// statistics, with the allowed states `[null, i→j, j→i, mutual]`.
    /// Sorted; empty whenever the MLE exists.
    pub restricted: Vec<(usize, usize, [bool; 4])>,
    pub status: FitStatus,
    pub iterations: usize,
    pub max_residual: f64,
}

impl P1Params {
    /// Parameters with every effect zero (uniform dyad states for `Rho::Zero`).
    pub fn zeros(labels: Vec<String>, rho: Rho) -> Self {
        let n = labels.len();
        let variant = match rho {
            Rho::Zero => Reciprocity::Zero,
            Rho::Constant(_) => Reciprocity::Constant,
            Rho::Dyadic { .. } => Reciprocity::Dyadic,
        };
        Self {
            labels,
            variant,
            theta: 0.0,
            alpha: vec![0.0; n],
            beta: vec![0.0; n],
            rho,
            restricted: Vec::new(),
            status: FitStatus::Converged,
            iterations: 0,
            max_residual: 0.0,
        }
    }

    pub fn converged(&self) -> bool {
        self.status == FitStatus::Converged
    }

    /// Expected `(out-degrees, in-degrees, mutual count)`.
    pub fn expected_statistics(&self) -> (Vec<f64>, Vec<f64>, f64) {
        let n = self.alpha.len();
        let mut out = vec![0.0; n];
        let mut inn = vec![0.0; n];
        let mut mutual = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let p = self.dyad_probs(i, j);
                out[i] += p[1] + p[3];
                inn[j] += p[1] + p[3];
                out[j] += p[2] + p[3];
                inn[i] += p[2] + p[3];
                mutual += p[3];
            }
        }
        (out, inn, mutual)
    }

    /// Unnormalised log-weights of `[null, i→j, j→i, mutual]`, ignoring
    /// structural zeros.
    fn log_weights(&self, i: usize, j: usize) -> [f64; 4] {
        let sij = self.theta + self.alpha[i] + self.beta[j];
        let sji = self.theta + self.alpha[j] + self.beta[i];
        [0.0, sij, sji, self.rho_offset().map_or(f64::NEG_INFINITY, |r| sij + sji + r)]
    }

    /// Allowed states of a restricted dyad, oriented as `i < j`.
    fn allowed(&self, i: usize, j: usize) -> Option<[bool; 4]> {
        let key = (i.min(j), i.max(j));
        self.restricted
            .binary_search_by_key(&key, |&(a, b, _)| (a, b))
            .ok()
            .map(|k| self.restricted[k].2)
    }

    /// Reciprocity added to the mutual state's log-weight; `None` when the
    /// mutual state is governed per dyad.
    fn rho_offset(&self) -> Option<f64> {
        match &self.rho {
            Rho::Zero => Some(0.0),
            Rho::Constant(r) => Some(*r),
            Rho::Dyadic { .. } => None,
        }
    }
}

impl DyadModel for P1Params {
    fn node_count(&self) -> usize {
        self.alpha.len()
    }

    fn dyad_probs(&self, i: usize, j: usize) -> [f64; 4] {
        if let Rho::Dyadic { mutual } = &self.rho {
            let key = if i < j { (i, j) } else { (j, i) };
            if mutual.contains(&key) {
                return [0.0, 0.0, 0.0, 1.0];
            }
        }
        let mut logw = self.log_weights(i, j);
        if let Some(a) = self.allowed(i, j) {
            let a = if i < j { a } else { [a[0], a[2], a[1], a[3]] };
            for (w, ok) in logw.iter_mut().zip(a) {
                if !ok {
                    *w = f64::NEG_INFINITY;
                }
            }
        }
        let m = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w = logw.map(|x| (x - m).exp());
        let z: f64 = w.iter().sum();
        w.map(|x| x / z)
    }
}

/// Materialised state probabilities for every dyad `i < j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DyadProbabilities {
    pub n: usize,
    pub probs: Vec<[f64; 4]>,
}

impl DyadModel for DyadProbabilities {
    fn node_count(&self) -> usize {
        self.n
    }

    fn dyad_probs(&self, i: usize, j: usize) -> [f64; 4] {
        if i < j {
            self.probs[dyad_index(self.n, i, j)]
        } else {
            let [a, b, c, d] = self.probs[dyad_index(self.n, j, i)];
            [a, c, b, d]
        }
    }
}

pub fn dyad_probs(p: &P1Params) -> DyadProbabilities {
    let n = p.node_count();
    let mut probs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            probs.push(p.dyad_probs(i, j));
        }
    }
    DyadProbabilities { n, probs }
}

struct Observed {
    out: Vec<f64>,
    inn: Vec<f64>,
    mutual: f64,
    mutual_set: BTreeSet<(usize, usize)>,
}

pub fn fit_p1(
    d: &SimpleDigraph,
    variant: Reciprocity,
    tol: f64,
    max_iter: usize,
) -> Result<P1Params, ModelError> {
    let n = d.node_count();
    if n < 2 {
        return Err(ModelError::TooFewNodes(n));
    }
    check_tolerance(tol)?;
    let (inn, out) = d.in_out_degrees();
    let obs = Observed {
        out: out.iter().map(|&x| x as f64).collect(),
        inn: inn.iter().map(|&x| x as f64).collect(),
        mutual: d.mutual_count() as f64,
        mutual_set: d.mutual_dyads(),
    };
    let rho = match variant {
        Reciprocity::Zero => Rho::Zero,
        Reciprocity::Constant => Rho::Constant(0.0),
        Reciprocity::Dyadic => Rho::Dyadic {
            mutual: obs.mutual_set.clone(),
        },
    };
    let mut p = P1Params::zeros(d.labels().to_vec(), rho);

    // states each dyad may take before looking at the margins
    let model_states = |i: usize, j: usize| -> Allowed {
        match &p.rho {
            Rho::Dyadic { mutual } if mutual.contains(&(i, j)) => [false, false, false, true],
            Rho::Dyadic { .. } => [true, true, true, false],
            _ => [true; 4],
        }
    };
    let mut allowed = Vec::with_capacity(n * (n - 1) / 2);
    let mut observed = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            allowed.push(model_states(i, j));
            observed.push(usize::from(d.has_edge(i, j)) + 2 * usize::from(d.has_edge(j, i)));
        }
    }
    let margins = Margins {
        out: &out,
        inn: &inn,
        mutual: (variant == Reciprocity::Constant).then_some(d.mutual_count()),
    };
    facial_set(n, &mut allowed, &observed, &margins);
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            if allowed[k] != model_states(i, j) {
                p.restricted.push((i, j, allowed[k]));
            }
            k += 1;
        }
    }
    let on_face = !p.restricted.is_empty();

    let mut boundary = false;
    let mut residual = residual(&p, &obs);
    let mut iterations = 0;
    let mut kappa = Vec::with_capacity(n);
    while residual >= tol && iterations < max_iter {
        boundary = false;
        // sender margins, then receiver margins
        for recv in [false, true] {
            for v in 0..n {
                kappa.clear();
                let mut target = if recv { obs.inn[v] } else { obs.out[v] };
                let x = if recv { p.beta[v] } else { p.alpha[v] };
                for u in (0..n).filter(|&u| u != v) {
                    let (i, j) = (v.min(u), v.max(u));
                    let role: [bool; 4] = if (v == i) != recv {
                        [false, true, false, true]
                    } else {
                        [false, false, true, true]
                    };
                    match coordinate_term(&p, i, j, role, x, &allowed[dyad_index(n, i, j)]) {
                        Term::Fixed(c) => target -= c,
                        Term::Logit(c) => kappa.push(c),
                    }
                }
                let slot = if recv { &mut p.beta[v] } else { &mut p.alpha[v] };
                boundary |= apply(slot, solve_logistic_sum(&kappa, target, x));
            }
        }
        // reciprocity margin
        if let Rho::Constant(r) = p.rho {
            kappa.clear();
            let mut target = obs.mutual;
            for i in 0..n {
                for j in i + 1..n {
                    let role = [false, false, false, true];
                    match coordinate_term(&p, i, j, role, r, &allowed[dyad_index(n, i, j)]) {
                        Term::Fixed(c) => target -= c,
                        Term::Logit(c) => kappa.push(c),
                    }
                }
            }
            let mut r = r;
            let sol = solve_logistic_sum(&kappa, target, r);
            boundary |= apply(&mut r, sol);
            p.rho = Rho::Constant(r);
        }
        apply_gauge(&mut p);
        iterations += 1;
        residual = self::residual(&p, &obs);
    }

    let capped = p.alpha.iter().chain(&p.beta).any(|x| x.abs() > PARAM_CAP)
        || matches!(p.rho, Rho::Constant(r) if r.abs() >= PARAM_CAP);
    p.status = if on_face || boundary || capped {
        FitStatus::Nonexistent
    } else if residual < tol {
        FitStatus::Converged
    } else {
        FitStatus::MaxIterations
    };
    p.iterations = iterations;
    p.max_residual = residual;
    Ok(p)
}

enum Term {
    /// The dyad contributes this much to the margin whatever the coordinate.
    Fixed(f64),
    /// The dyad contributes `σ(x + c)`.
    Logit(f64),
}

/// Contribution of dyad `(i, j)` to the margin of a coordinate currently at
/// `x` that enters the log-weight of each state flagged in `role` once.
fn coordinate_term(p: &P1Params, i: usize, j: usize, role: [bool; 4], x: f64, allowed: &Allowed) -> Term {
    let mut states = (0..4).filter(|&s| allowed[s]);
    if let (Some(s), None) = (states.next(), states.next()) {
        return Term::Fixed(f64::from(u8::from(role[s])));
    }
    let logw = p.log_weights(i, j);
    let (mut with, mut without) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for s in (0..4).filter(|&s| allowed[s]) {
        if role[s] {
            with = log_add_exp(with, logw[s] - x);
        } else {
            without = log_add_exp(without, logw[s]);
        }
    }
    match (with == f64::NEG_INFINITY, without == f64::NEG_INFINITY) {
        (true, _) => Term::Fixed(0.0),
        (false, true) => Term::Fixed(1.0),
        (false, false) => Term::Logit(with - without),
    }
}

/// Writes the solved coordinate; returns true when the margin was on the boundary.
fn apply(x: &mut f64, s: LogisticSolve) -> bool {
    match s {
        LogisticSolve::Root(v) => {
            *x = v.clamp(-PARAM_CAP, PARAM_CAP);
            v.abs() >= PARAM_CAP
        }
        LogisticSolve::Lower => {
            *x = -PARAM_CAP;
            true
        }
        LogisticSolve::Upper => {
            *x = PARAM_CAP;
            true
        }
        LogisticSolve::Free => false,
    }
}

fn apply_gauge(p: &mut P1Params) {
    let n = p.alpha.len() as f64;
    let ma = p.alpha.iter().sum::<f64>() / n;
    let mb = p.beta.iter().sum::<f64>() / n;
    p.alpha.iter_mut().for_each(|a| *a -= ma);
    p.beta.iter_mut().for_each(|b| *b -= mb);
    p.theta += ma + mb;
}

fn residual(p: &P1Params, obs: &Observed) -> f64 {
    let (out, inn, mutual) = p.expected_statistics();
    let mut r = out
        .iter()
        .zip(&obs.out)
        .chain(inn.iter().zip(&obs.inn))
        .map(|(e, o)| (e - o).abs())
        .fold(0.0, f64::max);
    if p.variant != Reciprocity::Zero {
        r = r.max((mutual - obs.mutual).abs());
    }
    r
}
