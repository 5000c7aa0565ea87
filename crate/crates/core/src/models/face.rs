//! Facial sets of the dyad-state table.
//!
//! When the observed margins lie on the boundary of their polytope the MLE
//! does not exist, but the extended MLE does: it is the MLE of the model
//! restricted to the dyad states that are positive in at least one
//! nonnegative table with the observed margins. That set of states is the
//! facial set. It is found in two stages. Margin propagation handles nodes
//! whose targets equal the fewest or most arcs still available. An
//! interior-point solve then settles the rest, as long as the number of
//! undetermined dyads is at most [`LP_MAX_DYADS`].

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, NonnegativeConeT, SolverStatus, ZeroConeT,
};

use super::dyad_index;

/// Allowed states of a dyad `i < j`: `[null, i→j, j→i, mutual]`.
pub(crate) type Allowed = [bool; 4];

/// Above this many undetermined dyads only propagation is used; the fit
/// then falls back on the parameter cap to flag divergence.
pub const LP_MAX_DYADS: usize = 100_000;

/// Interior-point values below this are read as zero.
const POSITIVE: f64 = 1e-6;

/// States in which `v` sends (`recv = false`) or receives on dyad `(i, j)`.
fn role_states(v: usize, i: usize, recv: bool) -> [usize; 2] {
    match (v == i, recv) {
        (true, false) | (false, true) => [1, 3],
        _ => [2, 3],
    }
}

pub(crate) struct Margins<'a> {
    pub out: &'a [usize],
    pub inn: &'a [usize],
    pub mutual: Option<usize>,
}

/// Shrinks `allowed` (indexed by [`dyad_index`]) to the facial set of the
/// observed margins. `observed[d]` is the observed state of dyad `d` and must
/// be allowed; it stays allowed.
pub(crate) fn facial_set(n: usize, allowed: &mut [Allowed], observed: &[usize], m: &Margins) {
    propagate(n, allowed, m);
    let open = allowed.iter().filter(|a| a.iter().filter(|&&x| x).count() > 1).count();
    if open > 0 && open <= LP_MAX_DYADS {
        let before = allowed.to_vec();
        refine_by_interior_point(n, allowed, m);
        // the observed table is feasible, so its states can never be cut; if
        // one was, the solve was not accurate enough to trust
        if allowed.iter().zip(observed).any(|(a, &o)| !a[o]) {
            allowed.copy_from_slice(&before);
        }
    }
}

/// Dyads of `v` forced into the role (sending or receiving), and dyads where
/// the role is still possible.
fn range(n: usize, allowed: &[Allowed], v: usize, recv: bool) -> (usize, usize) {
    let (mut forced, mut possible) = (0, 0);
    for u in (0..n).filter(|&u| u != v) {
        let (i, j) = (v.min(u), v.max(u));
        let a = &allowed[dyad_index(n, i, j)];
        let st = role_states(v, i, recv);
        let hit = st.iter().any(|&s| a[s]);
        let all = (0..4).filter(|&s| a[s]).all(|s| st.contains(&s));
        forced += usize::from(all);
        possible += usize::from(hit);
    }
    (forced, possible)
}

fn propagate(n: usize, allowed: &mut [Allowed], m: &Margins) {
    loop {
        let mut changed = false;
        for v in 0..n {
            for (recv, target) in [(false, m.out[v]), (true, m.inn[v])] {
                let (forced, possible) = range(n, allowed, v, recv);
                if forced == possible {
                    continue;
                }
                // at the lower end every optional role state is ruled out, at
                // the upper end every state without the role is
                let keep_role = if target == forced {
                    false
                } else if target == possible {
                    true
                } else {
                    continue;
                };
                for u in (0..n).filter(|&u| u != v) {
                    let (i, j) = (v.min(u), v.max(u));
                    let a = &mut allowed[dyad_index(n, i, j)];
                    let st = role_states(v, i, recv);
                    let has_role = st.iter().any(|&s| a[s]);
                    let all_role = (0..4).filter(|&s| a[s]).all(|s| st.contains(&s));
                    if has_role && !all_role {
                        for (s, x) in a.iter_mut().enumerate() {
                            if *x && st.contains(&s) != keep_role {
                                *x = false;
                                changed = true;
                            }
                        }
                    }
                }
            }
        }
        if let Some(target) = m.mutual {
            let forced = allowed.iter().filter(|a| a[3] && !a[0] && !a[1] && !a[2]).count();
            let possible = allowed.iter().filter(|a| a[3]).count();
            if forced < possible && (target == forced || target == possible) {
                for a in allowed.iter_mut().filter(|a| a[3] && (a[0] || a[1] || a[2])) {
                    if target == forced {
                        a[3] = false;
                    } else {
                        a[..3].fill(false);
                    }
                    changed = true;
                }
            }
        }
        if !changed {
            return;
        }
    }
}

/// Finds a point in the relative interior of the feasible tables with an
/// interior-point solver. With a zero objective every feasible point is
/// optimal, and interior-point iterates approach the analytic center of the
/// optimal set, so the states that stay clearly positive are exactly the
/// facial set. If the solver fails the propagated set is kept.
fn refine_by_interior_point(n: usize, allowed: &mut [Allowed], m: &Margins) {
    // one variable per state of every dyad that is still open
    let mut cols: Vec<(usize, usize)> = Vec::new();
    let mut out_rhs: Vec<f64> = m.out.iter().map(|&x| x as f64).collect();
    let mut in_rhs: Vec<f64> = m.inn.iter().map(|&x| x as f64).collect();
    let mut mutual_rhs = m.mutual.map(|x| x as f64);
    let (mut rows, mut cs, mut vals) = (Vec::new(), Vec::new(), Vec::new());
    let mut b = Vec::new();
    let mut d = 0;
    // rows 0..n out-margins, n..2n in-margins, 2n the mutual count, then dyad sums
    let dyad_row0 = 2 * n + 1;
    for i in 0..n {
        for j in i + 1..n {
            let a = allowed[d];
            let states: Vec<usize> = (0..4).filter(|&s| a[s]).collect();
            if let [s] = states[..] {
                // a settled dyad moves its contribution to the right-hand side
                let (si, sj) = (f64::from(u8::from(s == 1 || s == 3)), f64::from(u8::from(s == 2 || s == 3)));
                out_rhs[i] -= si;
                in_rhs[j] -= si;
                out_rhs[j] -= sj;
                in_rhs[i] -= sj;
                if let (3, Some(r)) = (s, mutual_rhs.as_mut()) {
                    *r -= 1.0;
                }
            } else {
                let row = dyad_row0 + b.len();
                b.push(1.0);
                for s in states {
                    let c = cols.len();
                    cols.push((d, s));
                    let mut put = |r: usize| {
                        rows.push(r);
                        cs.push(c);
                        vals.push(1.0);
                    };
                    put(row);
                    if s == 1 || s == 3 {
                        put(i);
                        put(n + j);
                    }
                    if s == 2 || s == 3 {
                        put(j);
                        put(n + i);
                    }
                    if s == 3 && mutual_rhs.is_some() {
                        put(2 * n);
                    }
                }
            }
            d += 1;
        }
    }
    let k = cols.len();
    let eq = dyad_row0 + b.len();
    let mut rhs = out_rhs;
    rhs.extend(in_rhs);
    rhs.push(mutual_rhs.unwrap_or(0.0));
    rhs.extend(b);
    // nonnegativity: -t + s = 0 with s ≥ 0
    for c in 0..k {
        rows.push(eq + c);
        cs.push(c);
        vals.push(-1.0);
    }
    rhs.extend(std::iter::repeat_n(0.0, k));
    let a = CscMatrix::new_from_triplets(eq + k, k, rows, cs, vals);
    let p = CscMatrix::zeros((k, k));
    let q = vec![0.0; k];
    let cones = [ZeroConeT(eq), NonnegativeConeT(k)];
    let settings = DefaultSettingsBuilder::default().verbose(false).build().expect("valid settings");
    let Ok(mut solver) = DefaultSolver::new(&p, &q, &a, &rhs, &cones, settings) else { return };
    solver.solve();
    if solver.solution.status != SolverStatus::Solved {
        return;
    }
    let x = &solver.solution.x;
    for (&(d, s), &v) in cols.iter().zip(x) {
        if v < POSITIVE {
            allowed[d][s] = false;
        }
    }
}
