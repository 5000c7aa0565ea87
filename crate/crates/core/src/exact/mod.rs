//! Exact conditional goodness-of-fit tests.
//!
//! The reference distribution is the uniform distribution on the fiber of
//! networks sharing the observed sufficient statistics. A lazy symmetric
//! random walk started at the observed network samples it; the p-value is
//! the add-one estimate `(1 + #{T_s ≥ T_obs}) / (1 + S)` over the `S`
//! recorded statistics.

mod enumerate;
mod walk;

use std::io::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

pub use enumerate::{enumerate_fiber, FiberConstraints, MutualConstraint, ENUMERATION_NODE_CAP};
pub use walk::{DirectedWalk, DyadChange, UndirectedWalk, DEFAULT_MAX_MOVE_EDGES};

use crate::graph::{SimpleDigraph, SimpleGraph};
use crate::models::{
    dyad_contribution, gof_statistic_digraph, gof_statistic_graph, DyadModel, EdgeModel, ModelError,
    Reciprocity,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExactError {
    #[error("invalid walk configuration: {0}")]
    Config(String),
    #[error("fiber enumeration is limited to {ENUMERATION_NODE_CAP} nodes, got {0}")]
    EnumerationCap(usize),
    #[error("fiber has more than {0} members")]
    FiberTooLarge(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberWalkConfig {
    pub n_steps: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    /// Largest number of edges rewired by one directed move.
    pub max_move_edges: usize,
}

impl FiberWalkConfig {
    /// `n_steps` steps with 10% burn-in and no thinning.
    pub fn new(n_steps: usize, seed: u64) -> Self {
        Self {
            n_steps,
            burn_in: n_steps / 10,
            thin: 1,
            seed,
            max_move_edges: DEFAULT_MAX_MOVE_EDGES,
        }
    }

    pub fn validate(&self) -> Result<(), ExactError> {
        if self.n_steps == 0 {
            return Err(ExactError::Config("n_steps must be positive".into()));
        }
        if self.burn_in >= self.n_steps {
            return Err(ExactError::Config(format!(
                "burn_in ({}) must be smaller than n_steps ({})",
                self.burn_in, self.n_steps
            )));
        }
        if self.thin == 0 {
            return Err(ExactError::Config("thin must be at least 1".into()));
        }
        if self.max_move_edges < 2 {
            return Err(ExactError::Config("max_move_edges must be at least 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GofResult {
    pub observed_statistic: f64,
    pub sampled_statistics: Vec<f64>,
    pub p_value: f64,
    /// Accepted and rejected proposals after burn-in.
    pub accepted_moves: usize,
    pub rejected_moves: usize,
    pub burn_in_accepted: usize,
    /// No proposal was ever accepted, so the walk never left the observed network.
    pub degenerate: bool,
    pub seed: u64,
    pub chains: usize,
}

/// Relative tolerance for treating a sampled statistic as equal to the
/// observed one; sampled values are tracked incrementally and carry
/// round-off.
pub const TIE_TOLERANCE: f64 = 1e-9;

pub fn add_one_p_value(observed: f64, sampled: &[f64]) -> f64 {
    let cut = observed - TIE_TOLERANCE * observed.abs().max(1.0);
    let hits = sampled.iter().filter(|&&s| s >= cut).count();
    (1 + hits) as f64 / (1 + sampled.len()) as f64
}

impl GofResult {
    /// Concatenates independent chains run from the same observed network.
    pub fn merge(results: Vec<GofResult>) -> Option<GofResult> {
        let mut it = results.into_iter();
        let mut acc = it.next()?;
        for r in it {
            acc.sampled_statistics.extend(r.sampled_statistics);
            acc.accepted_moves += r.accepted_moves;
            acc.rejected_moves += r.rejected_moves;
            acc.burn_in_accepted += r.burn_in_accepted;
            acc.degenerate &= r.degenerate;
            acc.chains += r.chains;
        }
        acc.p_value = if acc.degenerate {
            1.0
        } else {
            add_one_p_value(acc.observed_statistic, &acc.sampled_statistics)
        };
        Some(acc)
    }

    /// Writes the sampled statistics as little-endian `f64`s.
    pub fn write_samples_le<W: Write>(&self, mut w: W) -> io::Result<()> {
        for s in &self.sampled_statistics {
            w.write_all(&s.to_le_bytes())?;
        }
        Ok(())
    }
}

fn run_walk<F>(cfg: &FiberWalkConfig, observed: f64, mut step: F) -> GofResult
where
    F: FnMut(&mut ChaCha8Rng) -> Option<f64>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut stat = observed;
    let mut sampled = Vec::with_capacity((cfg.n_steps - cfg.burn_in) / cfg.thin);
    let (mut accepted, mut rejected, mut burn_accepted) = (0, 0, 0);
    for t in 1..=cfg.n_steps {
        let moved = match step(&mut rng) {
            Some(delta) => {
                stat += delta;
                true
            }
            None => false,
        };
        if t <= cfg.burn_in {
            burn_accepted += usize::from(moved);
            continue;
        }
        if moved {
            accepted += 1;
        } else {
            rejected += 1;
        }
        if (t - cfg.burn_in).is_multiple_of(cfg.thin) {
            sampled.push(stat);
        }
    }
    let degenerate = accepted + burn_accepted == 0;
    let p_value = if degenerate {
        1.0
    } else {
        add_one_p_value(observed, &sampled)
    };
    GofResult {
        observed_statistic: observed,
        sampled_statistics: sampled,
        p_value,
        accepted_moves: accepted,
        rejected_moves: rejected,
        burn_in_accepted: burn_accepted,
        degenerate,
        seed: cfg.seed,
        chains: 1,
    }
}

/// Exact test of an undirected dyad-independence model (β model) on `g`,
/// sampling the fiber of graphs with `g`'s degree sequence.
pub fn exact_gof_test_graph<M: EdgeModel>(
    g: &SimpleGraph,
    model: &M,
    cfg: &FiberWalkConfig,
) -> Result<GofResult, ExactError> {
    cfg.validate()?;
    let observed = gof_statistic_graph(g, model)?;
    let mut walk = UndirectedWalk::new(g);
    let contrib = |lo: usize, hi: usize, state: usize| {
        let p = model.edge_prob(lo, hi);
        dyad_contribution(&[1.0 - p, p], state)
    };
    Ok(run_walk(cfg, observed, |rng| {
        walk.step(rng).map(|changes| {
            changes
                .iter()
                .map(|c| contrib(c.lo, c.hi, c.after) - contrib(c.lo, c.hi, c.before))
                .sum()
        })
    }))
}

/// Exact test of a p1 model on `d`, sampling the fiber defined by the
/// in/out-degrees plus the reciprocity statistic of `variant`.
pub fn exact_gof_test_digraph<M: DyadModel>(
    d: &SimpleDigraph,
    model: &M,
    variant: Reciprocity,
    cfg: &FiberWalkConfig,
) -> Result<GofResult, ExactError> {
    cfg.validate()?;
    let observed = gof_statistic_digraph(d, model)?;
    let mut walk = DirectedWalk::new(d, variant, cfg.max_move_edges);
    let contrib = |lo: usize, hi: usize, state: usize| dyad_contribution(&model.dyad_probs(lo, hi), state);
    Ok(run_walk(cfg, observed, |rng| {
        walk.step(rng).map(|changes| {
            changes
                .iter()
                .map(|c| contrib(c.lo, c.hi, c.after) - contrib(c.lo, c.hi, c.before))
                .sum()
        })
    }))
}

/// Runs `chains` independent chains concurrently (chain `c` uses seed
/// `cfg.seed + c`) and merges them.
pub fn run_parallel_chains<F>(cfg: &FiberWalkConfig, chains: usize, run: F) -> Result<GofResult, ExactError>
where
    F: Fn(&FiberWalkConfig) -> Result<GofResult, ExactError> + Sync,
{
    if chains == 0 {
        return Err(ExactError::Config("chains must be at least 1".into()));
    }
    let results: Vec<Result<GofResult, ExactError>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..chains)
            .map(|c| {
                let mut cc = cfg.clone();
                cc.seed = cfg.seed.wrapping_add(c as u64);
                let run = &run;
                s.spawn(move || run(&cc))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("chain thread panicked")).collect()
    });
    let results = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut merged = GofResult::merge(results).expect("at least one chain");
    merged.seed = cfg.seed;
    Ok(merged)
}

/// One β-fiber move from `g`; `None` when the proposal is rejected.
pub fn beta_fiber_move<R: rand::Rng + ?Sized>(g: &SimpleGraph, rng: &mut R) -> Option<SimpleGraph> {
    let mut w = UndirectedWalk::new(g);
    w.step(rng)?;
    Some(w.to_graph(g.labels().to_vec()))
}

/// One p1-fiber move from `d` under `variant`; `None` when rejected.
pub fn p1_fiber_move<R: rand::Rng + ?Sized>(
    d: &SimpleDigraph,
    variant: Reciprocity,
    rng: &mut R,
) -> Option<SimpleDigraph> {
    let mut w = DirectedWalk::new(d, variant, DEFAULT_MAX_MOVE_EDGES);
    w.step(rng)?;
    Some(w.to_digraph(d.labels().to_vec()))
}
