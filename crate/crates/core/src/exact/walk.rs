//! Lazy Markov moves on fibers of simple networks.
//!
//! Each kernel is reversible with respect to the uniform distribution: most
//! proposals are symmetric (the reverse move is proposed with the same
//! probability from the target state), and the one that is not carries a
//! Metropolis correction. Proposals leaving the fiber are rejected by staying
//! in place. The walk is therefore uniform-stationary on the connected
//! component of the fiber containing its start.

use std::collections::{HashMap, HashSet};

use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::graph::{SimpleDigraph, SimpleGraph};
use crate::models::Reciprocity;

/// Arcs removed and arcs added by one proposal.
type Rewire = (Vec<(usize, usize)>, Vec<(usize, usize)>);

/// One dyad whose state changed in an accepted move. States follow the
/// [`DyadModel`](crate::models::DyadModel) convention for `lo < hi`:
/// 0 null, 1 lo→hi, 2 hi→lo, 3 mutual (undirected: 0 absent, 1 present).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadChange {
    pub lo: usize,
    pub hi: usize,
    pub before: usize,
    pub after: usize,
}

/// Degree-preserving double-edge swaps on an undirected simple graph.
#[derive(Debug, Clone)]
pub struct UndirectedWalk {
    n: usize,
    edges: Vec<(usize, usize)>,
    present: HashSet<(usize, usize)>,
}

#[inline]
fn ordered(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl UndirectedWalk {
    pub fn new(g: &SimpleGraph) -> Self {
        let edges: Vec<_> = g.edges().collect();
        let present = edges.iter().copied().collect();
        Self {
            n: g.node_count(),
            edges,
            present,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Current edge set, sorted, as `(i, j)` with `i < j`.
    pub fn canonical_edges(&self) -> Vec<(usize, usize)> {
        let mut e = self.edges.clone();
        e.sort_unstable();
        e
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(u, v) in &self.edges {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }

    pub fn to_graph(&self, labels: Vec<String>) -> SimpleGraph {
        SimpleGraph::from_edges(labels, self.edges.iter().copied()).expect("walk keeps the graph simple")
    }

    /// Picks two distinct edges `{a,b}`, `{c,d}` uniformly and, by a fair coin,
    /// proposes `{a,d},{c,b}` or `{a,c},{b,d}`. Returns the applied dyad
    /// changes, or `None` when the proposal was rejected.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<Vec<DyadChange>> {
        let m = self.edges.len();
        if m < 2 {
            return None;
        }
        let i1 = rng.random_range(0..m);
        let mut i2 = rng.random_range(0..m - 1);
        if i2 >= i1 {
            i2 += 1;
        }
        let flip: bool = rng.random();
        let (a, b) = self.edges[i1];
        let (c, d) = self.edges[i2];
        if a == c || a == d || b == c || b == d {
            return None;
        }
        let (f1, f2) = if flip {
            (ordered(a, d), ordered(c, b))
        } else {
            (ordered(a, c), ordered(b, d))
        };
        if self.present.contains(&f1) || self.present.contains(&f2) {
            return None;
        }
        let (e1, e2) = (self.edges[i1], self.edges[i2]);
        self.present.remove(&e1);
        self.present.remove(&e2);
        self.present.insert(f1);
        self.present.insert(f2);
        self.edges[i1] = f1;
        self.edges[i2] = f2;
        let change = |(lo, hi): (usize, usize), before, after| DyadChange { lo, hi, before, after };
        Some(vec![change(e1, 1, 0), change(e2, 1, 0), change(f1, 0, 1), change(f2, 0, 1)])
    }
}

/// Default largest number of edges rewired by one [`DirectedWalk`] move.
pub const DEFAULT_MAX_MOVE_EDGES: usize = 4;

fn derangement<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<usize> {
    let mut sigma: Vec<usize> = (0..k).collect();
    loop {
        sigma.shuffle(rng);
        if sigma.iter().enumerate().all(|(i, &s)| i != s) {
            return sigma;
        }
    }
}

/// A vector with O(1) membership, insertion and swap-removal. Iteration
/// order depends only on the sequence of operations, keeping walks
/// reproducible.
#[derive(Debug, Clone, Default)]
struct IndexedSet {
    items: Vec<(usize, usize)>,
    pos: HashMap<(usize, usize), usize>,
}

impl IndexedSet {
    fn insert(&mut self, x: (usize, usize)) {
        if !self.pos.contains_key(&x) {
            self.pos.insert(x, self.items.len());
            self.items.push(x);
        }
    }

    fn remove(&mut self, x: (usize, usize)) {
        if let Some(i) = self.pos.remove(&x) {
            self.items.swap_remove(i);
            if let Some(&moved) = self.items.get(i) {
                self.pos.insert(moved, i);
            }
        }
    }

    fn len(&self) -> usize {
        self.items.len()
    }
}

/// Head-permutation moves on a loop-free digraph.
///
/// A move picks `k` distinct edges `(s_1→t_1), …, (s_k→t_k)` as a uniformly
/// random ordered tuple, with `k` uniform in `2..=max_move_edges`, draws a
/// uniform derangement `σ` of `1..=k` and replaces the edges by
/// `(s_i→t_σ(i))`. Every in- and out-degree is preserved. `k = 2` is the
/// directed two-edge swap, `k = 3` includes reversal of a directed triangle
/// and `k = 4` includes pairs of simultaneous swaps. Derangements are closed
/// under inversion and relabelling, so the proposal is symmetric.
/// Reciprocity constraints are enforced by rejection:
///
/// * [`Reciprocity::Zero`]: only loops and duplicate edges are rejected;
/// * [`Reciprocity::Constant`]: the total number of mutual dyads must not change;
/// * [`Reciprocity::Dyadic`]: no dyad may gain or lose its mutual status.
///
/// Under [`Reciprocity::Dyadic`] the arcs of mutual dyads can never move, so
/// they are held aside and tuples are drawn from the asymmetric arcs only.
/// That set keeps its size, so the proposal stays symmetric.
///
/// Half of the remaining steps grow an alternating cycle from the current
/// arcs instead of drawing a blind tuple (see `alternating_cycle`); these are
/// far more often valid on small dense fibers and are Metropolis-corrected.
///
/// Dense digraphs have few absent arcs, and their fibers are better connected
/// through the complement. Of the blind steps, a fraction equal to the arc
/// density (fixed on the fiber) instead draws `k` distinct absent arcs `(a_i→b_i)`
/// and a derangement `σ`, removes `(a_i→b_σ(i))` and adds `(a_i→b_i)`.
/// This is the head-permutation move on the complement, hence also symmetric.
///
/// Under [`Reciprocity::Constant`] a third of the steps are exchange moves: the
/// tuple is both arcs of a uniform mutual dyad plus `k − 2` uniform
/// asymmetric arcs, and the move is kept only if the new arcs again consist
/// of one mutual dyad plus asymmetric arcs. The number of such tuples is the
/// same for every member of the fiber, and the acceptance condition is
/// symmetric in the two endpoints, so this kernel is symmetric too. It moves
/// mutual dyads far more often than the generic move.
#[derive(Debug, Clone)]
pub struct DirectedWalk {
    n: usize,
    /// Arcs eligible for generic moves.
    edges: IndexedSet,
    frozen: Vec<(usize, usize)>,
    present: HashSet<(usize, usize)>,
    /// Mutual dyads `(lo, hi)` and asymmetric arcs; maintained for `Constant`.
    mutual: IndexedSet,
    asymmetric: IndexedSet,
    /// Movable arcs grouped by head.
    in_arcs: Vec<IndexedSet>,
    out_degree: Vec<usize>,
    variant: Reciprocity,
    max_move_edges: usize,
}

impl DirectedWalk {
    pub fn new(d: &SimpleDigraph, variant: Reciprocity, max_move_edges: usize) -> Self {
        let present = d.edges().collect();
        let (frozen, movable): (Vec<_>, Vec<_>) = if variant == Reciprocity::Dyadic {
            d.edges().partition(|&(u, v)| d.is_mutual(u, v))
        } else {
            (Vec::new(), d.edges().collect())
        };
        let mut edges = IndexedSet::default();
        movable.into_iter().for_each(|e| edges.insert(e));
        let mut mutual = IndexedSet::default();
        let mut asymmetric = IndexedSet::default();
        if variant == Reciprocity::Constant {
            for (u, v) in d.edges() {
                if !d.is_mutual(u, v) {
                    asymmetric.insert((u, v));
                } else if u < v {
                    mutual.insert((u, v));
                }
            }
        }
        let mut in_arcs = vec![IndexedSet::default(); d.node_count()];
        for &(u, v) in &edges.items {
            in_arcs[v].insert((u, v));
        }
        let (_, out_degree) = d.in_out_degrees();
        Self {
            n: d.node_count(),
            edges,
            frozen,
            present,
            mutual,
            asymmetric,
            in_arcs,
            out_degree,
            variant,
            max_move_edges: max_move_edges.max(2),
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn canonical_edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<_> = self.edges.items.iter().chain(&self.frozen).copied().collect();
        e.sort_unstable();
        e
    }

    pub fn to_digraph(&self, labels: Vec<String>) -> SimpleDigraph {
        SimpleDigraph::from_edges(labels, self.edges.items.iter().chain(&self.frozen).copied())
            .expect("walk keeps the digraph simple")
    }

    fn state(&self, lo: usize, hi: usize, removed: &[(usize, usize)], added: &[(usize, usize)]) -> usize {
        let has = |u: usize, v: usize| {
            (self.present.contains(&(u, v)) && !removed.contains(&(u, v))) || added.contains(&(u, v))
        };
        usize::from(has(lo, hi)) + 2 * usize::from(has(hi, lo))
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<Vec<DyadChange>> {
        let exchange = self.variant == Reciprocity::Constant && rng.random_bool(1.0 / 3.0);
        let (removed, added) = if exchange {
            self.head_permutation(self.exchange_tuple(rng)?, rng)?
        } else if rng.random::<bool>() {
            self.alternating_cycle(rng)?
        } else if rng.random_bool(self.density()) {
            self.complement_move(rng)?
        } else {
            let m = self.edges.len();
            let kmax = self.max_move_edges.min(m);
            if kmax < 2 {
                return None;
            }
            let k = rng.random_range(2..=kmax);
            let tuple = index::sample(rng, m, k).into_iter().map(|i| self.edges.items[i]).collect();
            self.head_permutation(tuple, rng)?
        };

        let mut dyads: Vec<(usize, usize)> = removed
            .iter()
            .chain(&added)
            .map(|&(u, v)| ordered(u, v))
            .collect();
        dyads.sort_unstable();
        dyads.dedup();
        let mut changes = Vec::with_capacity(dyads.len());
        let mut mutual_delta = 0i64;
        for (lo, hi) in dyads {
            let before = self.state(lo, hi, &[], &[]);
            let after = self.state(lo, hi, &removed, &added);
            let (mb, ma) = (before == 3, after == 3);
            if self.variant == Reciprocity::Dyadic && mb != ma {
                return None;
            }
            mutual_delta += i64::from(ma) - i64::from(mb);
            if before != after {
                changes.push(DyadChange { lo, hi, before, after });
            }
        }
        if self.variant == Reciprocity::Constant && mutual_delta != 0 {
            return None;
        }
        if exchange && !self.is_exchange_shape(&added, &removed) {
            return None;
        }

        for &e in &removed {
            self.present.remove(&e);
            self.edges.remove(e);
            self.in_arcs[e.1].remove(e);
        }
        for &f in &added {
            self.present.insert(f);
            self.edges.insert(f);
            self.in_arcs[f.1].insert(f);
        }
        if self.variant == Reciprocity::Constant {
            for c in &changes {
                self.retag(c.lo, c.hi, c.before, false);
                self.retag(c.lo, c.hi, c.after, true);
            }
        }
        Some(changes)
    }

    /// Arc density; constant on a fiber since the arc count is.
    fn density(&self) -> f64 {
        let cells = self.n * self.n.saturating_sub(1);
        if cells == 0 {
            0.0
        } else {
            self.present.len() as f64 / cells as f64
        }
    }

    /// Rewires `tuple` by a uniform derangement of its heads.
    fn head_permutation<R: Rng + ?Sized>(
        &self,
        tuple: Vec<(usize, usize)>,
        rng: &mut R,
    ) -> Option<Rewire> {
        let sigma = derangement(tuple.len(), rng);
        let mut added = Vec::with_capacity(tuple.len());
        for (j, &(s, _)) in tuple.iter().enumerate() {
            let t = tuple[sigma[j]].1;
            if s == t || self.present.contains(&(s, t)) || added.contains(&(s, t)) {
                return None;
            }
            added.push((s, t));
        }
        Some((tuple, added))
    }

    /// The same move applied to the complement: `k` uniform distinct absent
    /// arcs are rewired by a derangement of their heads, and the arcs they
    /// displace must be present and movable.
    fn complement_move<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Option<Rewire> {
        let absent = self.n * self.n.saturating_sub(1) - self.present.len();
        let kmax = self.max_move_edges.min(absent);
        if kmax < 2 {
            return None;
        }
        let k = rng.random_range(2..=kmax);
        let mut added: Vec<(usize, usize)> = Vec::with_capacity(k);
        while added.len() < k {
            let u = rng.random_range(0..self.n);
            let v = rng.random_range(0..self.n);
            if u != v && !self.present.contains(&(u, v)) && !added.contains(&(u, v)) {
                added.push((u, v));
            }
        }
        let sigma = derangement(k, rng);
        let mut removed = Vec::with_capacity(k);
        for (j, &(s, _)) in added.iter().enumerate() {
            let t = added[sigma[j]].1;
            if !self.edges.pos.contains_key(&(s, t)) || removed.contains(&(s, t)) {
                return None;
            }
            removed.push((s, t));
        }
        Some((removed, added))
    }

    /// Alternating cycle grown from the current arcs: a uniform node `t_1`
    /// and a uniform movable arc `(s_1→t_1)` into it, then for each further
    /// position a head `t_i` uniform among the nodes `s_(i−1)` does not
    /// point to and a uniform movable arc `(s_i→t_i)` into it. The move
    /// replaces every `(s_i→t_i)` by `(s_i→t_(i+1))`, closing with
    /// `(s_k→t_1)`.
    ///
    /// Reading the cycle backwards from `(s_1→t_2)` gives the reverse path,
    /// and all choice sets have sizes fixed by the degrees, so the proposal
    /// ratio reduces to `c(s_2) / c(s_k)` with `c(s) = n − 1 − out(s)`. The
    /// move is kept with that Metropolis probability.
    fn alternating_cycle<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Option<Rewire> {
        let kmax = self.max_move_edges.min(self.edges.len());
        if kmax < 2 {
            return None;
        }
        let k = rng.random_range(2..=kmax);
        let mut removed: Vec<(usize, usize)> = Vec::with_capacity(k);
        let mut head = rng.random_range(0..self.n);
        for i in 0..k {
            if i > 0 {
                let s = removed[i - 1].0;
                head = self.non_out_neighbour(s, rng)?;
            }
            let arcs = &self.in_arcs[head];
            if arcs.len() == 0 {
                return None;
            }
            let e = arcs.items[rng.random_range(0..arcs.len())];
            if removed.contains(&e) {
                return None;
            }
            removed.push(e);
        }
        let mut added = Vec::with_capacity(k);
        for i in 0..k {
            let f = (removed[i].0, removed[(i + 1) % k].1);
            if f.0 == f.1 || self.present.contains(&f) || added.contains(&f) {
                return None;
            }
            added.push(f);
        }
        let c = |s: usize| (self.n - 1 - self.out_degree[s]) as f64;
        let ratio = c(removed[1].0) / c(removed[k - 1].0);
        (ratio >= 1.0 || rng.random::<f64>() < ratio).then_some((removed, added))
    }

    /// Uniform node other than `s` that `s` has no arc to.
    fn non_out_neighbour<R: Rng + ?Sized>(&self, s: usize, rng: &mut R) -> Option<usize> {
        if self.out_degree[s] + 1 >= self.n {
            return None;
        }
        loop {
            let t = rng.random_range(0..self.n);
            if t != s && !self.present.contains(&(s, t)) {
                return Some(t);
            }
        }
    }

    /// Both arcs of a uniform mutual dyad (uniform orientation) followed by
    /// `k − 2` distinct uniform asymmetric arcs.
    fn exchange_tuple<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Vec<(usize, usize)>> {
        let kmax = self.max_move_edges.min(self.asymmetric.len() + 2);
        if self.mutual.len() == 0 || kmax < 3 {
            return None;
        }
        let k = rng.random_range(3..=kmax);
        let (a, b) = self.mutual.items[rng.random_range(0..self.mutual.len())];
        let mut t = if rng.random::<bool>() {
            vec![(a, b), (b, a)]
        } else {
            vec![(b, a), (a, b)]
        };
        t.extend(
            index::sample(rng, self.asymmetric.len(), k - 2)
                .into_iter()
                .map(|i| self.asymmetric.items[i]),
        );
        Some(t)
    }

    /// Whether `arcs`, in the network after replacing `removed` by `arcs`,
    /// are exactly the two arcs of one mutual dyad plus asymmetric arcs.
    fn is_exchange_shape(&self, arcs: &[(usize, usize)], removed: &[(usize, usize)]) -> bool {
        let has = |u: usize, v: usize| {
            (self.present.contains(&(u, v)) && !removed.contains(&(u, v))) || arcs.contains(&(u, v))
        };
        let mutual_arcs = arcs.iter().filter(|&&(u, v)| has(v, u)).count();
        if mutual_arcs != 2 {
            return false;
        }
        // the two mutual arcs must pair with each other
        arcs.iter()
            .filter(|&&(u, v)| has(v, u))
            .all(|&(u, v)| arcs.contains(&(v, u)))
    }

    fn retag(&mut self, lo: usize, hi: usize, state: usize, insert: bool) {
        let apply = |set: &mut IndexedSet, x| if insert { set.insert(x) } else { set.remove(x) };
        match state {
            1 => apply(&mut self.asymmetric, (lo, hi)),
            2 => apply(&mut self.asymmetric, (hi, lo)),
            3 => apply(&mut self.mutual, (lo, hi)),
            _ => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn path_never_moves() {
        let g = SimpleGraph::unlabeled(3, [(0, 1), (1, 2)]).unwrap();
        let mut w = UndirectedWalk::new(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!((0..500).all(|_| w.step(&mut rng).is_none()));
    }

    #[test]
    fn four_cycle_keeps_degrees() {
        let g = SimpleGraph::unlabeled(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let mut w = UndirectedWalk::new(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut moved = 0;
        for _ in 0..500 {
            moved += usize::from(w.step(&mut rng).is_some());
            assert_eq!(w.degrees(), vec![2, 2, 2, 2]);
        }
        assert!(moved > 0);
    }

    #[test]
    fn single_edge_digraph_never_moves() {
        let d = SimpleDigraph::unlabeled(3, [(0, 1)]).unwrap();
        for v in [Reciprocity::Zero, Reciprocity::Constant, Reciprocity::Dyadic] {
            let mut w = DirectedWalk::new(&d, v, DEFAULT_MAX_MOVE_EDGES);
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            assert!((0..200).all(|_| w.step(&mut rng).is_none()));
        }
    }

    #[test]
    fn triangle_reversal_is_reachable() {
        let d = SimpleDigraph::unlabeled(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let mut w = DirectedWalk::new(&d, Reciprocity::Zero, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let reversed = vec![(0, 2), (1, 0), (2, 1)];
        assert!((0..2_000).any(|_| {
            w.step(&mut rng);
            w.canonical_edges() == reversed
        }));
    }

    #[test]
    fn dyadic_walk_keeps_mutual_dyads() {
        let d = SimpleDigraph::unlabeled(5, [(0, 1), (1, 0), (1, 2), (2, 3), (3, 4), (4, 1), (0, 3)]).unwrap();
        let mutual = d.mutual_dyads();
        let mut w = DirectedWalk::new(&d, Reciprocity::Dyadic, DEFAULT_MAX_MOVE_EDGES);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2_000 {
            w.step(&mut rng);
            let cur = w.to_digraph(d.labels().to_vec());
            assert_eq!(cur.mutual_dyads(), mutual);
            assert_eq!(cur.in_out_degrees(), d.in_out_degrees());
        }
    }
}
