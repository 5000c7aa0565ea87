//! JSON reports.
//!
//! Every report is a `serde_json::Value` whose objects are B-tree maps, so
//! keys come out sorted and the serialized bytes depend only on the content.

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::exact::{FiberWalkConfig, GofResult};
use crate::graph::DyadCensus;
use crate::hyper::{HyperDegreeProfile, Hypergraph};
use crate::kcore::{CoreDecomposition, CoreRanking};
use crate::models::{BetaParams, P1Params, Rho};

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    // Round-trip through Value so struct field order never leaks into the output.
    let v = serde_json::to_value(value).expect("report values are serializable");
    let mut s = serde_json::to_string_pretty(&v).expect("Value always serializes");
    s.push('\n');
    s
}

fn by_label(labels: &[String], values: &[f64]) -> Value {
    let m: Map<String, Value> = labels
        .iter()
        .zip(values)
        .map(|(l, v)| (l.clone(), json!(v)))
        .collect();
    Value::Object(m)
}

pub fn beta_fit_report(b: &BetaParams) -> Value {
    json!({
        "model": "beta",
        "node_count": b.labels.len(),
        "parameters": { "beta": by_label(&b.labels, &b.beta) },
        "iterations": b.iterations,
        "max_residual": b.max_residual,
        "status": b.status,
        "converged": b.converged(),
    })
}

pub fn p1_fit_report(p: &P1Params) -> Value {
    let rho = match &p.rho {
        Rho::Zero => json!(0.0),
        Rho::Constant(r) => json!(r),
        Rho::Dyadic { mutual } => {
            let pairs: Vec<[&str; 2]> = mutual
                .iter()
                .map(|&(i, j)| [p.labels[i].as_str(), p.labels[j].as_str()])
                .collect();
            json!({ "infinite_for_mutual_dyads": pairs, "other_dyads": "-inf" })
        }
    };
    let (out, inn, mutual) = p.expected_statistics();
    json!({
        "model": "p1",
        "variant": p.variant,
        "node_count": p.labels.len(),
        "parameters": {
            "theta": p.theta,
            "alpha": by_label(&p.labels, &p.alpha),
            "beta": by_label(&p.labels, &p.beta),
            "rho": rho,
        },
        "expected": {
            "out_degree": by_label(&p.labels, &out),
            "in_degree": by_label(&p.labels, &inn),
            "mutual": mutual,
        },
        "iterations": p.iterations,
        "max_residual": p.max_residual,
        "restricted_dyads": p.restricted.len(),
        "status": p.status,
        "converged": p.converged(),
    })
}

pub fn core_report(c: &CoreDecomposition, labels: &[String], ranking: Option<&CoreRanking>) -> Value {
    let numbers: Map<String, Value> = labels
        .iter()
        .zip(&c.core_number)
        .map(|(l, &k)| (l.clone(), json!(k)))
        .collect();
    let innermost: Vec<&str> = c
        .k_core_nodes(c.degeneracy)
        .into_iter()
        .map(|i| labels[i].as_str())
        .collect();
    let mut v = json!({
        "mode": c.mode,
        "degeneracy": c.degeneracy,
        "core_number": numbers,
        "innermost_core": innermost,
    });
    if let Some(r) = ranking {
        v["ranking"] = json!({
            "rule": "in-core degree descending, then label ascending",
            "entries": r.entries,
            "short": r.short,
        });
    }
    v
}

pub fn census_report(c: &DyadCensus) -> Value {
    json!({
        "mutual": c.mutual,
        "asymmetric": c.asymmetric,
        "null": c.null,
        "total": c.total(),
    })
}

/// Per-author degrees keyed by edge size, plus the edge-size histogram.
pub fn degree_profile_report(h: &Hypergraph, p: &HyperDegreeProfile) -> Value {
    let authors: Map<String, Value> = h
        .labels()
        .iter()
        .enumerate()
        .map(|(v, l)| {
            let sizes: Map<String, Value> =
                p.by_size[v].iter().map(|(s, c)| (s.to_string(), json!(c))).collect();
            (l.clone(), json!({ "by_size": sizes, "total": p.total[v] }))
        })
        .collect();
    let hist: Map<String, Value> = h
        .size_histogram()
        .into_iter()
        .map(|(s, c)| (s.to_string(), json!(c)))
        .collect();
    // Figure-style bins: for each size s, how many authors have each degree.
    let mut bins: Map<String, Value> = Map::new();
    for s in h.size_histogram().into_keys() {
        let mut counts = std::collections::BTreeMap::<usize, usize>::new();
        for v in 0..h.node_count() {
            let d = p.degree(v, s);
            if d > 0 {
                *counts.entry(d).or_default() += 1;
            }
        }
        let m: Map<String, Value> = counts.into_iter().map(|(d, c)| (d.to_string(), json!(c))).collect();
        bins.insert(s.to_string(), Value::Object(m));
    }
    json!({
        "author_count": h.node_count(),
        "edge_count": h.edges().len(),
        "edge_size_histogram": hist,
        "degree_histogram_by_size": bins,
        "authors": authors,
    })
}

/// Exact-test summary; sampled statistics are summarized, not listed.
pub fn gof_report(r: &GofResult, cfg: &FiberWalkConfig) -> Value {
    let n = r.sampled_statistics.len();
    let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
    for &s in &r.sampled_statistics {
        lo = lo.min(s);
        hi = hi.max(s);
        sum += s;
    }
    let summary = if n == 0 {
        Value::Null
    } else {
        json!({ "count": n, "min": lo, "max": hi, "mean": sum / n as f64 })
    };
    json!({
        "statistic": "pearson-chi-square-over-dyad-states",
        "observed_statistic": r.observed_statistic,
        "p_value": r.p_value,
        "p_value_estimator": "add-one",
        "sampled": summary,
        "accepted_moves": r.accepted_moves,
        "rejected_moves": r.rejected_moves,
        "burn_in_accepted": r.burn_in_accepted,
        "degenerate": r.degenerate,
        "chains": r.chains,
        "config": cfg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::FitStatus;

    #[test]
    fn keys_are_sorted() {
        let b = BetaParams {
            labels: vec!["z".into(), "a".into()],
            beta: vec![1.0, -1.0],
            status: FitStatus::Converged,
            iterations: 3,
            max_residual: 0.0,
        };
        let s = to_json_string(&beta_fit_report(&b));
        let a = s.find("\"a\"").unwrap();
        let z = s.find("\"z\"").unwrap();
        assert!(a < z);
        assert!(s.find("\"converged\"").unwrap() < s.find("\"status\"").unwrap());
        assert!(s.ends_with('\n'));
    }

    #[test]
    fn profile_bins() {
        let h = Hypergraph::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![0, 1], vec![0, 1], vec![2]],
        )
        .unwrap();
        let p = crate::hyper::hyper_degrees(&h);
        let v = degree_profile_report(&h, &p);
        assert_eq!(v["degree_histogram_by_size"]["2"]["2"], json!(2));
        assert_eq!(v["edge_size_histogram"]["1"], json!(1));
    }
}
