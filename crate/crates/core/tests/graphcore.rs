#![allow(clippy::needless_range_loop)]

mod common;

use std::collections::BTreeSet;

use common::*;
use netfiber::graph::{largest_connected_component, Network};
use netfiber::kcore::*;
use netfiber::{SimpleDigraph, SimpleGraph};
use rand::Rng;

#[test]
fn degrees_match_edge_scan() {
    let mut r = rng(21);
    for _ in 0..20 {
        let n = r.random_range(2..30);
        let d = random_digraph(&mut r, n, 0.2);
        let (mut ins, mut outs) = (vec![0; n], vec![0; n]);
        for u in 0..n {
            for v in 0..n {
                if d.has_edge(u, v) {
                    outs[u] += 1;
                    ins[v] += 1;
                }
            }
        }
        assert_eq!(d.in_out_degrees(), (ins.clone(), outs.clone()));
        assert_eq!(ins.iter().sum::<usize>(), d.edge_count());
        let g = d.to_undirected();
        assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.edge_count());
    }
}

#[test]
fn census_matches_all_pairs_classification() {
    let mut r = rng(22);
    for _ in 0..20 {
        let p = r.random_range(0.05..0.6);
        let d = random_digraph(&mut r, 15, p);
        let (mut m, mut a, mut z) = (0, 0, 0);
        for i in 0..15 {
            for j in i + 1..15 {
                match (d.has_edge(i, j), d.has_edge(j, i)) {
                    (true, true) => m += 1,
                    (false, false) => z += 1,
                    _ => a += 1,
                }
            }
        }
        let c = d.dyad_census();
        assert_eq!((c.mutual, c.asymmetric, c.null), (m, a, z));
        assert_eq!(c.total(), 105);
    }
}

#[test]
fn undirected_cores_match_repeated_deletion() {
    let mut r = rng(23);
    for _ in 0..100 {
        let n = r.random_range(1..=50);
        let p = r.random_range(0.02..0.4);
        let g = random_graph(&mut r, n, p);
        let edges: Vec<_> = g.edges().collect();
        assert_eq!(core_decomposition(&g).core_number, brute_force_cores(n, &edges, false));
    }
}

#[test]
fn in_degree_cores_match_repeated_deletion() {
    let mut r = rng(24);
    for _ in 0..100 {
        let n = r.random_range(1..=50);
        let p = r.random_range(0.02..0.4);
        let d = random_digraph(&mut r, n, p);
        let arcs: Vec<_> = d.edges().collect();
        assert_eq!(directed_core_in(&d).core_number, brute_force_cores(n, &arcs, true));
    }
}

#[test]
fn innermost_core_is_max_core_of_oracle() {
    let mut r = rng(25);
    for _ in 0..30 {
        let g = random_graph(&mut r, 30, 0.2);
        let edges: Vec<_> = g.edges().collect();
        let oracle = brute_force_cores(30, &edges, false);
        let top = *oracle.iter().max().unwrap();
        let expect: Vec<usize> = (0..30).filter(|&v| oracle[v] == top).collect();
        let c = core_decomposition(&g);
        let inner = innermost_core(&c, &g).unwrap();
        assert_eq!(inner.nodes, expect);
        assert_eq!(inner.subgraph, g.induced_subgraph(&expect));
    }
}

#[test]
fn two_cliques_form_the_innermost_core() {
    let mut r = rng(26);
    for _ in 0..10 {
        let g = two_cliques_with_attachments(&mut r, 50);
        let c = core_decomposition(&g);
        assert_eq!(c.degeneracy, 9);
        let inner = innermost_core(&c, &g).unwrap();
        assert_eq!(inner.nodes, (0..20).collect::<Vec<_>>());
        assert_eq!(inner.subgraph.edge_count(), 90);
    }
}

#[test]
fn k_cores_have_minimum_degree_k() {
    let mut r = rng(27);
    for _ in 0..30 {
        let d = random_digraph(&mut r, 25, 0.25);
        let c = directed_core_in(&d);
        for k in 1..=c.degeneracy {
            let nodes = c.k_core_nodes(k);
            let sub = d.induced_subgraph(&nodes);
            assert!((0..sub.node_count()).all(|v| sub.in_degree(v) >= k));
        }
        let g = d.to_undirected();
        let c = core_decomposition(&g);
        for k in 1..=c.degeneracy {
            let sub = g.induced_subgraph(&c.k_core_nodes(k));
            assert!(sub.degrees().iter().all(|&x| x >= k));
        }
    }
}

#[test]
fn ranking_uses_in_core_degree_then_label() {
    // 4-clique of mutual arcs on {a,b,c,d} plus extra arcs into x from outside
    // the core: x ranks by in-core degree, not by total in-degree.
    let labels: Vec<String> = ["d", "c", "b", "a", "o1", "o2"].iter().map(|s| s.to_string()).collect();
    let mut arcs = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                arcs.push((i, j));
            }
        }
    }
    arcs.extend([(4, 0), (5, 0), (4, 5)]);
    let d = SimpleDigraph::from_edges(labels, arcs).unwrap();
    let c = directed_core_in(&d);
    let rank = top_k_by_core_degree(&c, &d, 3).unwrap();
    let names: Vec<_> = rank.entries.iter().map(|e| e.label.as_str()).collect();
    assert_eq!(names, ["a", "b", "c"]);
    assert!(rank.entries.iter().all(|e| e.score == 3));
    let all = top_k_by_core_degree(&c, &d, 10).unwrap();
    assert!(all.short);
    assert_eq!(all.entries.len(), 4);
}

fn bfs_reach(n: usize, adj: &[BTreeSet<usize>], s: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([s]);
    let mut stack = vec![s];
    while let Some(u) = stack.pop() {
        for &w in &adj[u] {
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    debug_assert!(seen.iter().all(|&v| v < n));
    seen
}

#[test]
fn weak_lcc_matches_bfs_from_every_node() {
    let mut r = rng(28);
    for _ in 0..40 {
        let n = r.random_range(1..40);
        let d = random_digraph(&mut r, n, 1.2 / n as f64);
        let mut adj = vec![BTreeSet::new(); n];
        for (u, v) in d.edges() {
            adj[u].insert(v);
            adj[v].insert(u);
        }
        // largest reach set; ties by smallest minimum member
        let mut best: BTreeSet<usize> = BTreeSet::new();
        for s in 0..n {
            let c = bfs_reach(n, &adj, s);
            if c.len() > best.len() || (c.len() == best.len() && c.first() < best.first()) {
                best = c;
            }
        }
        let nodes: Vec<usize> = best.into_iter().collect();
        let lcc = largest_connected_component(&d).unwrap();
        assert_eq!(lcc, d.induced_subgraph(&nodes));
        let g = d.to_undirected();
        assert_eq!(largest_connected_component(&g).unwrap(), g.induced_subgraph(&nodes));
        assert_eq!(Network::node_count(&lcc), nodes.len());
    }
}

#[test]
fn dot_export_lists_every_edge_once() {
    let g = SimpleGraph::unlabeled(3, [(0, 1), (1, 2)]).unwrap();
    let dot = g.to_dot();
    assert_eq!(dot.matches(" -- ").count(), 2);
    assert!(dot.starts_with("graph"));
}
