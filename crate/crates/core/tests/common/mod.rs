//! Independent reference implementations used as test oracles. None of
//! these call into the library beyond reading graph structure.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeMap, BTreeSet};

use netfiber::graph::{SimpleDigraph, SimpleGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> SimpleGraph {
    let mut e = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                e.push((i, j));
            }
        }
    }
    SimpleGraph::unlabeled(n, e).unwrap()
}

pub fn random_digraph<R: Rng>(rng: &mut R, n: usize, p: f64) -> SimpleDigraph {
    let mut e = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random_bool(p) {
                e.push((i, j));
            }
        }
    }
    SimpleDigraph::unlabeled(n, e).unwrap()
}

// ---------------------------------------------------------------- k-cores

/// Core numbers by repeated deletion: for each k, delete nodes whose degree
/// in the survivors is below k until nothing changes.
pub fn brute_force_cores(n: usize, arcs: &[(usize, usize)], directed: bool) -> Vec<usize> {
    let mut core = vec![0; n];
    for k in 1..=n {
        let mut alive = vec![true; n];
        loop {
            let mut deg = vec![0; n];
            for &(u, v) in arcs {
                if alive[u] && alive[v] {
                    deg[v] += 1;
                    if !directed {
                        deg[u] += 1;
                    }
                }
            }
            let mut changed = false;
            for v in 0..n {
                if alive[v] && deg[v] < k {
                    alive[v] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if !alive.iter().any(|&a| a) {
            break;
        }
        for v in 0..n {
            if alive[v] {
                core[v] = k;
            }
        }
    }
    core
}

// ---------------------------------------------------- generic maximizer

/// Maximizes a smooth concave objective: gradient ascent with
/// Barzilai–Borwein steps and backtracking, then damped Newton steps on a
/// finite-difference Hessian for full precision. Returns `(argmax, ‖grad‖∞)`.
pub fn maximize_concave<F, G>(f: F, grad: G, x0: Vec<f64>, iters: usize) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    let norm = |g: &[f64]| g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut x = x0;
    let mut g = grad(&x);
    let mut step = 0.1;
    for _ in 0..iters {
        if norm(&g) < 1e-6 {
            break;
        }
        let fx = f(&x);
        let gg: f64 = g.iter().map(|v| v * v).sum();
        let mut t = step;
        let mut xn;
        loop {
            xn = x.iter().zip(&g).map(|(a, b)| a + t * b).collect::<Vec<_>>();
            if f(&xn) >= fx + 1e-4 * t * gg || t < 1e-14 {
                break;
            }
            t *= 0.5;
        }
        let gn = grad(&xn);
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| b - a).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        let ss: f64 = s.iter().map(|v| v * v).sum();
        step = if sy > 1e-300 { (ss / sy).clamp(1e-6, 1e3) } else { 1.0 };
        x = xn;
        g = gn;
    }
    let dim = x.len();
    for _ in 0..50 {
        if norm(&g) < 1e-12 {
            break;
        }
        // negative Hessian by central differences of the gradient
        let h = 1e-6;
        let mut a = vec![vec![0.0; dim]; dim];
        for k in 0..dim {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += h;
            xm[k] -= h;
            let (gp, gm) = (grad(&xp), grad(&xm));
            for i in 0..dim {
                a[i][k] = -(gp[i] - gm[i]) / (2.0 * h);
            }
        }
        for i in 0..dim {
            for k in 0..i {
                let m = 0.5 * (a[i][k] + a[k][i]);
                a[i][k] = m;
                a[k][i] = m;
            }
            a[i][i] += 1e-9;
        }
        let s = solve(a, g.clone());
        let xn: Vec<f64> = x.iter().zip(&s).map(|(p, q)| p + q).collect();
        let gn = grad(&xn);
        if norm(&gn) >= norm(&g) {
            break;
        }
        x = xn;
        g = gn;
    }
    let gnorm = norm(&g);
    (x, gnorm)
}

/// Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

fn log1pexp(x: f64) -> f64 {
    if x > 30.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn logsumexp(v: &[f64]) -> f64 {
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// β-model MLE by direct maximization of the log-likelihood.
pub fn beta_oracle(n: usize, degrees: &[usize]) -> (Vec<f64>, f64) {
    let d: Vec<f64> = degrees.iter().map(|&x| x as f64).collect();
    let f = |b: &[f64]| {
        let mut l: f64 = b.iter().zip(&d).map(|(x, y)| x * y).sum();
        for i in 0..n {
            for j in i + 1..n {
                l -= log1pexp(b[i] + b[j]);
            }
        }
        l
    };
    let grad = |b: &[f64]| {
        let mut g = d.clone();
        for i in 0..n {
            for j in i + 1..n {
                let p = 1.0 / (1.0 + (-(b[i] + b[j])).exp());
                g[i] -= p;
                g[j] -= p;
            }
        }
        g
    };
    maximize_concave(f, grad, vec![0.0; n], 200_000)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Zero,
    Constant,
    Dyadic,
}

/// Dyad-state log-weights `[null, i→j, j→i, mutual]` written out directly.
pub fn p1_log_weights(theta: f64, a: &[f64], b: &[f64], rho: f64, i: usize, j: usize) -> [f64; 4] {
    let x = theta + a[i] + b[j];
    let y = theta + a[j] + b[i];
    [0.0, x, y, x + y + rho]
}

/// Parameter vector layout: `[θ, α_0..α_{n-1}, β_0..β_{n-1}, ρ]`.
/// Returns per-dyad state probabilities (mutual-aware for `Dyadic`).
pub fn p1_oracle_probs(d: &SimpleDigraph, v: Variant, x: &[f64]) -> BTreeMap<(usize, usize), [f64; 4]> {
    let n = d.node_count();
    let (theta, a, b) = (x[0], &x[1..=n], &x[n + 1..=2 * n]);
    let rho = if v == Variant::Constant { x[2 * n + 1] } else { 0.0 };
    let mut out = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            let w = p1_log_weights(theta, a, b, rho, i, j);
            let p = if v == Variant::Dyadic {
                if d.has_edge(i, j) && d.has_edge(j, i) {
                    [0.0, 0.0, 0.0, 1.0]
                } else {
                    let z = logsumexp(&w[..3]);
                    [(w[0] - z).exp(), (w[1] - z).exp(), (w[2] - z).exp(), 0.0]
                }
            } else {
                let z = logsumexp(&w);
                [(w[0] - z).exp(), (w[1] - z).exp(), (w[2] - z).exp(), (w[3] - z).exp()]
            };
            out.insert((i, j), p);
        }
    }
    out
}

pub fn state(d: &SimpleDigraph, i: usize, j: usize) -> usize {
    usize::from(d.has_edge(i, j)) + 2 * usize::from(d.has_edge(j, i))
}

/// p1 MLE by direct maximization; returns the parameter vector and the
/// final gradient norm.
pub fn p1_oracle(d: &SimpleDigraph, v: Variant) -> (Vec<f64>, f64) {
    let n = d.node_count();
    let dim = 2 * n + 2;
    let f = |x: &[f64]| {
        let probs = p1_oracle_probs(d, v, x);
        probs
            .iter()
            .map(|(&(i, j), p)| {
                let s = state(d, i, j);
                if p[s] > 0.0 {
                    p[s].ln()
                } else {
                    -1e300
                }
            })
            .sum::<f64>()
    };
    let grad = |x: &[f64]| {
        let probs = p1_oracle_probs(d, v, x);
        let mut g = vec![0.0; dim];
        for (&(i, j), p) in &probs {
            let s = state(d, i, j);
            // observed minus expected indicator of each arc and of mutuality
            let obs_ij = f64::from(u8::from(s & 1 == 1));
            let obs_ji = f64::from(u8::from(s & 2 == 2));
            let e_ij = p[1] + p[3];
            let e_ji = p[2] + p[3];
            let dij = obs_ij - e_ij;
            let dji = obs_ji - e_ji;
            g[0] += dij + dji;
            g[1 + i] += dij;
            g[1 + j] += dji;
            g[1 + n + j] += dij;
            g[1 + n + i] += dji;
            if v == Variant::Constant {
                g[2 * n + 1] += f64::from(u8::from(s == 3)) - p[3];
            }
        }
        g
    };
    maximize_concave(f, grad, vec![0.0; dim], 200_000)
}

// ------------------------------------------------------ fiber oracles

/// All loop-free digraphs on `n ≤ 4` nodes by scanning every bitmask of the
/// `n(n−1)` off-diagonal cells.
pub fn bitmask_digraphs(n: usize) -> Vec<BTreeSet<(usize, usize)>> {
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    (0u32..1 << cells.len())
        .map(|mask| cells.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &c)| c).collect())
        .collect()
}

pub fn bitmask_graphs(n: usize) -> Vec<BTreeSet<(usize, usize)>> {
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    (0u32..1 << cells.len())
        .map(|mask| cells.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &c)| c).collect())
        .collect()
}

pub fn arc_margins(n: usize, arcs: &BTreeSet<(usize, usize)>) -> (Vec<usize>, Vec<usize>) {
    let mut out = vec![0; n];
    let mut inn = vec![0; n];
    for &(u, v) in arcs {
        out[u] += 1;
        inn[v] += 1;
    }
    (out, inn)
}

pub fn mutual_pairs(arcs: &BTreeSet<(usize, usize)>) -> BTreeSet<(usize, usize)> {
    arcs.iter().filter(|&&(u, v)| u < v && arcs.contains(&(v, u))).copied().collect()
}

/// Upper critical value of the chi-square distribution.
pub fn chi2_critical(df: usize, alpha: f64) -> f64 {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    ChiSquared::new(df as f64).unwrap().inverse_cdf(1.0 - alpha)
}

// --------------------------------------------------- uniformity trials

use netfiber::exact::{enumerate_fiber, DirectedWalk, FiberConstraints, UndirectedWalk};
use netfiber::models::Reciprocity;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiberKind {
    Beta,
    P1(Reciprocity),
}

pub const FIBER_KINDS: [FiberKind; 4] = [
    FiberKind::Beta,
    FiberKind::P1(Reciprocity::Zero),
    FiberKind::P1(Reciprocity::Constant),
    FiberKind::P1(Reciprocity::Dyadic),
];

pub enum Start {
    Graph(SimpleGraph),
    Digraph(SimpleDigraph, Reciprocity),
}

/// A random start network whose enumerated fiber has `lo..=hi` members.
pub fn random_fiber<R: Rng>(rng: &mut R, kind: FiberKind, lo: usize, hi: usize) -> (Start, Vec<Vec<(usize, usize)>>) {
    loop {
        let pr = rng.random_range(0.2..0.6);
        let (start, c) = match kind {
            FiberKind::Beta => {
                let n = rng.random_range(4..=8);
                let g = random_graph(rng, n, pr);
                let c = FiberConstraints::beta(&g);
                (Start::Graph(g), c)
            }
            FiberKind::P1(v) => {
                let n = rng.random_range(3..=6);
                let d = random_digraph(rng, n, pr);
                let c = FiberConstraints::p1(&d, v);
                (Start::Digraph(d, v), c)
            }
        };
        if let Ok(f) = enumerate_fiber(&c, hi) {
            if f.len() >= lo {
                return (start, f);
            }
        }
    }
}

/// Visit counts of a `steps`-step chain recorded every `thin` steps,
/// indexed like `fiber`.
pub fn visit_counts(
    start: &Start,
    fiber: &[Vec<(usize, usize)>],
    steps: usize,
    thin: usize,
    seed: u64,
    max_move_edges: usize,
) -> Vec<usize> {
    let index: BTreeMap<&Vec<(usize, usize)>, usize> = fiber.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let mut counts = vec![0; fiber.len()];
    let mut r = rng(seed);
    let mut record = |edges: Vec<(usize, usize)>| counts[index[&edges]] += 1;
    match start {
        Start::Graph(g) => {
            let mut w = UndirectedWalk::new(g);
            for t in 1..=steps {
                w.step(&mut r);
                if t % thin == 0 {
                    record(w.canonical_edges());
                }
            }
        }
        Start::Digraph(d, v) => {
            let mut w = DirectedWalk::new(d, *v, max_move_edges);
            for t in 1..=steps {
                w.step(&mut r);
                if t % thin == 0 {
                    record(w.canonical_edges());
                }
            }
        }
    }
    counts
}

/// Pearson chi-square statistic against the uniform distribution.
pub fn uniform_chi2(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    let e = total as f64 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum()
}

// ------------------------------------------------------ ingest data

/// Random `(author, paper)` rows, possibly with duplicates.
pub fn random_rows<R: Rng>(rng: &mut R, authors: usize, papers: usize, rows: usize) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = (0..papers)
        .map(|p| (format!("a{}", rng.random_range(0..authors)), format!("p{p}")))
        .collect();
    while out.len() < rows {
        out.push((
            format!("a{}", rng.random_range(0..authors)),
            format!("p{}", rng.random_range(0..papers)),
        ));
    }
    out
}

/// Random paper citations among `papers` papers, self-citations included.
pub fn random_cites<R: Rng>(rng: &mut R, papers: usize, count: usize) -> Vec<(String, String)> {
    (0..count)
        .map(|_| {
            (
                format!("p{}", rng.random_range(0..papers)),
                format!("p{}", rng.random_range(0..papers)),
            )
        })
        .collect()
}

/// Author sets per paper name, by grouping distinct rows.
pub fn group_by_paper(rows: &[(String, String)]) -> BTreeMap<String, BTreeSet<String>> {
    let mut m: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for (a, p) in rows {
        m.entry(p.clone()).or_default().insert(a.clone());
    }
    m
}

// ------------------------------------------------------------ fixtures

pub fn clique_edges(nodes: std::ops::Range<usize>) -> Vec<(usize, usize)> {
    let v: Vec<usize> = nodes.collect();
    v.iter().enumerate().flat_map(|(x, &i)| v[x + 1..].iter().map(move |&j| (i, j))).collect()
}

/// Two disjoint 10-cliques (nodes 0..20) plus `extra` nodes, each joined to
/// one or two uniformly chosen earlier nodes. The extra nodes have core
/// number at most 2.
pub fn two_cliques_with_attachments<R: Rng>(rng: &mut R, extra: usize) -> SimpleGraph {
    let mut edges = clique_edges(0..10);
    edges.extend(clique_edges(10..20));
    for v in 20..20 + extra {
        let links = rng.random_range(1..=2);
        for _ in 0..links {
            edges.push((rng.random_range(0..v), v));
        }
    }
    SimpleGraph::unlabeled(20 + extra, edges).unwrap()
}
