//! Exhaustive enumeration of small fibers by backtracking over dyads.

use std::collections::BTreeSet;

use crate::graph::{SimpleDigraph, SimpleGraph};
use crate::models::Reciprocity;

use super::ExactError;

/// Hard limit on the node count accepted by [`enumerate_fiber`].
pub const ENUMERATION_NODE_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MutualConstraint {
    Unconstrained,
    Total(usize),
    /// Exactly these dyads (`i < j`) are mutual.
    Exact(BTreeSet<(usize, usize)>),
}

/// Sufficient statistics that define a fiber.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FiberConstraints {
    Degrees(Vec<usize>),
    Directed {
        out_degrees: Vec<usize>,
        in_degrees: Vec<usize>,
        mutual: MutualConstraint,
    },
}

impl FiberConstraints {
    pub fn beta(g: &SimpleGraph) -> Self {
        Self::Degrees(g.degrees())
    }

    pub fn p1(d: &SimpleDigraph, variant: Reciprocity) -> Self {
        let (in_degrees, out_degrees) = d.in_out_degrees();
        let mutual = match variant {
            Reciprocity::Zero => MutualConstraint::Unconstrained,
            Reciprocity::Constant => MutualConstraint::Total(d.mutual_count()),
            Reciprocity::Dyadic => MutualConstraint::Exact(d.mutual_dyads()),
        };
        Self::Directed {
            out_degrees,
            in_degrees,
            mutual,
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Self::Degrees(d) => d.len(),
            Self::Directed { out_degrees, .. } => out_degrees.len(),
        }
    }
}

/// Lists every network satisfying `constraints` as a sorted edge list
/// (`i < j` pairs when undirected, ordered pairs when directed). Fails when
/// the node count exceeds [`ENUMERATION_NODE_CAP`] or the fiber has more
/// than `max_members` elements.
pub fn enumerate_fiber(
    constraints: &FiberConstraints,
    max_members: usize,
) -> Result<Vec<Vec<(usize, usize)>>, ExactError> {
    let n = constraints.node_count();
    if n > ENUMERATION_NODE_CAP {
        return Err(ExactError::EnumerationCap(n));
    }
    let dyads: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    match constraints {
        FiberConstraints::Degrees(deg) => {
            let mut s = Undirected {
                dyads: &dyads,
                remaining: deg.clone(),
                slots: vec![n.saturating_sub(1); n],
                chosen: Vec::new(),
                out: &mut out,
                max: max_members,
            };
            s.go(0)?;
        }
        FiberConstraints::Directed {
            out_degrees,
            in_degrees,
            mutual,
        } => {
            if in_degrees.len() != n {
                return Ok(out);
            }
            let mut s = Directed {
                dyads: &dyads,
                ro: out_degrees.clone(),
                ri: in_degrees.clone(),
                slots: vec![n.saturating_sub(1); n],
                mutual,
                mutual_left: match mutual {
                    MutualConstraint::Total(t) => *t,
                    _ => 0,
                },
                chosen: Vec::new(),
                out: &mut out,
                max: max_members,
            };
            s.go(0)?;
        }
    }
    for e in &mut out {
        e.sort_unstable();
    }
    out.sort();
    Ok(out)
}

struct Undirected<'a> {
    dyads: &'a [(usize, usize)],
    remaining: Vec<usize>,
    slots: Vec<usize>,
    chosen: Vec<(usize, usize)>,
    out: &'a mut Vec<Vec<(usize, usize)>>,
    max: usize,
}

impl Undirected<'_> {
    fn go(&mut self, k: usize) -> Result<(), ExactError> {
        if k == self.dyads.len() {
            if self.remaining.iter().all(|&r| r == 0) {
                if self.out.len() == self.max {
                    return Err(ExactError::FiberTooLarge(self.max));
                }
                self.out.push(self.chosen.clone());
            }
            return Ok(());
        }
        let (i, j) = self.dyads[k];
        self.slots[i] -= 1;
        self.slots[j] -= 1;
        // absent
        if self.remaining[i] <= self.slots[i] && self.remaining[j] <= self.slots[j] {
            self.go(k + 1)?;
        }
        // present
        if self.remaining[i] > 0 && self.remaining[j] > 0 {
            self.remaining[i] -= 1;
            self.remaining[j] -= 1;
            if self.remaining[i] <= self.slots[i] && self.remaining[j] <= self.slots[j] {
                self.chosen.push((i, j));
                self.go(k + 1)?;
                self.chosen.pop();
            }
            self.remaining[i] += 1;
            self.remaining[j] += 1;
        }
        self.slots[i] += 1;
        self.slots[j] += 1;
        Ok(())
    }
}

struct Directed<'a> {
    dyads: &'a [(usize, usize)],
    ro: Vec<usize>,
    ri: Vec<usize>,
    slots: Vec<usize>,
    mutual: &'a MutualConstraint,
    mutual_left: usize,
    chosen: Vec<(usize, usize)>,
    out: &'a mut Vec<Vec<(usize, usize)>>,
    max: usize,
}

impl Directed<'_> {
    fn feasible(&self, v: usize) -> bool {
        self.ro[v] <= self.slots[v] && self.ri[v] <= self.slots[v]
    }

    fn go(&mut self, k: usize) -> Result<(), ExactError> {
        if k == self.dyads.len() {
            let done = self.ro.iter().chain(&self.ri).all(|&r| r == 0) && self.mutual_left == 0;
            if done {
                if self.out.len() == self.max {
                    return Err(ExactError::FiberTooLarge(self.max));
                }
                self.out.push(self.chosen.clone());
            }
            return Ok(());
        }
        let (i, j) = self.dyads[k];
        self.slots[i] -= 1;
        self.slots[j] -= 1;
        for state in 0..4usize {
            let fwd = state & 1 == 1;
            let back = state & 2 == 2;
            let is_mutual = fwd && back;
            let allowed = match self.mutual {
                MutualConstraint::Unconstrained => true,
                MutualConstraint::Total(_) => !is_mutual || self.mutual_left > 0,
                MutualConstraint::Exact(set) => set.contains(&(i, j)) == is_mutual,
            };
            if !allowed {
                continue;
            }
            let need_i = (usize::from(fwd), usize::from(back));
            let need_j = (usize::from(back), usize::from(fwd));
            if self.ro[i] < need_i.0 || self.ri[i] < need_i.1 || self.ro[j] < need_j.0 || self.ri[j] < need_j.1 {
                continue;
            }
            self.ro[i] -= need_i.0;
            self.ri[i] -= need_i.1;
            self.ro[j] -= need_j.0;
            self.ri[j] -= need_j.1;
            if is_mutual && matches!(self.mutual, MutualConstraint::Total(_)) {
                self.mutual_left -= 1;
            }
            if self.feasible(i) && self.feasible(j) {
                if fwd {
                    self.chosen.push((i, j));
                }
                if back {
                    self.chosen.push((j, i));
                }
                self.go(k + 1)?;
                if fwd {
                    self.chosen.pop();
                }
                if back {
                    self.chosen.pop();
                }
            }
            if is_mutual && matches!(self.mutual, MutualConstraint::Total(_)) {
                self.mutual_left += 1;
            }
            self.ro[i] += need_i.0;
            self.ri[i] += need_i.1;
            self.ro[j] += need_j.0;
            self.ri[j] += need_j.1;
        }
        self.slots[i] += 1;
        self.slots[j] += 1;
        Ok(())
    }
}
