//! Python bindings. Graphs come in as a node count plus an edge list of
//! index pairs; reports come back as the same dictionaries the CLI prints.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use netfiber::exact::{exact_gof_test_digraph, exact_gof_test_graph, run_parallel_chains, FiberWalkConfig};
use netfiber::hyper::{build_hypergraph, hyper_degrees};
use netfiber::ingest::parse_bipartite;
use netfiber::kcore::{core_decomposition, directed_core_in};
use netfiber::models::{fit_beta as beta, fit_p1 as p1, Reciprocity};
use netfiber::report;
use netfiber::{SimpleDigraph, SimpleGraph};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    let text = report::to_json_string(v);
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn graph(n: usize, edges: Vec<(usize, usize)>) -> PyResult<SimpleGraph> {
    SimpleGraph::unlabeled(n, edges).map_err(value_error)
}

fn digraph(n: usize, arcs: Vec<(usize, usize)>) -> PyResult<SimpleDigraph> {
    SimpleDigraph::unlabeled(n, arcs).map_err(value_error)
}

fn walk_config(steps: usize, burn_in: Option<usize>, thin: usize, seed: u64) -> PyResult<FiberWalkConfig> {
    let mut cfg = FiberWalkConfig::new(steps, seed);
    cfg.burn_in = burn_in.unwrap_or(steps / 10);
    cfg.thin = thin;
    cfg.validate().map_err(value_error)?;
    Ok(cfg)
}

/// Core numbers of an undirected graph, or in-core numbers of a digraph.
#[pyfunction]
#[pyo3(signature = (n, edges, directed = false))]
fn core_numbers(n: usize, edges: Vec<(usize, usize)>, directed: bool) -> PyResult<Vec<usize>> {
    let c = if directed {
        directed_core_in(&digraph(n, edges)?)
    } else {
        core_decomposition(&graph(n, edges)?)
    };
    Ok(c.core_number)
}

#[pyfunction]
#[pyo3(signature = (n, edges, tol = 1e-8, max_iter = 10_000))]
fn fit_beta(py: Python<'_>, n: usize, edges: Vec<(usize, usize)>, tol: f64, max_iter: usize) -> PyResult<Py<PyAny>> {
    let b = beta(&graph(n, edges)?, tol, max_iter).map_err(value_error)?;
    to_py(py, &report::beta_fit_report(&b))
}

#[pyfunction]
#[pyo3(signature = (n, arcs, rho = "dyadic", tol = 1e-8, max_iter = 10_000))]
fn fit_p1(
    py: Python<'_>,
    n: usize,
    arcs: Vec<(usize, usize)>,
    rho: &str,
    tol: f64,
    max_iter: usize,
) -> PyResult<Py<PyAny>> {
    let variant: Reciprocity = rho.parse().map_err(value_error)?;
    let p = p1(&digraph(n, arcs)?, variant, tol, max_iter).map_err(value_error)?;
    to_py(py, &report::p1_fit_report(&p))
}

/// Exact test of the beta model on an undirected graph.
#[pyfunction]
#[pyo3(signature = (n, edges, steps = 10_000, burn_in = None, thin = 1, seed = 0, chains = 1))]
#[allow(clippy::too_many_arguments)]
fn gof_beta(
    py: Python<'_>,
    n: usize,
    edges: Vec<(usize, usize)>,
    steps: usize,
    burn_in: Option<usize>,
    thin: usize,
    seed: u64,
    chains: usize,
) -> PyResult<Py<PyAny>> {
    let g = graph(n, edges)?;
    let cfg = walk_config(steps, burn_in, thin, seed)?;
    let fit = beta(&g, 1e-8, 10_000).map_err(value_error)?;
    let r = py
        .detach(|| run_parallel_chains(&cfg, chains, |c| exact_gof_test_graph(&g, &fit, c)))
        .map_err(value_error)?;
    to_py(py, &report::gof_report(&r, &cfg))
}

/// Exact test of a p1 variant on a digraph.
#[pyfunction]
#[pyo3(signature = (n, arcs, rho = "dyadic", steps = 10_000, burn_in = None, thin = 1, seed = 0, chains = 1))]
#[allow(clippy::too_many_arguments)]
fn gof_p1(
    py: Python<'_>,
    n: usize,
    arcs: Vec<(usize, usize)>,
    rho: &str,
    steps: usize,
    burn_in: Option<usize>,
    thin: usize,
    seed: u64,
    chains: usize,
) -> PyResult<Py<PyAny>> {
    let d = digraph(n, arcs)?;
    let variant: Reciprocity = rho.parse().map_err(value_error)?;
    let cfg = walk_config(steps, burn_in, thin, seed)?;
    let fit = p1(&d, variant, 1e-8, 10_000).map_err(value_error)?;
    let r = py
        .detach(|| run_parallel_chains(&cfg, chains, |c| exact_gof_test_digraph(&d, &fit, variant, c)))
        .map_err(value_error)?;
    to_py(py, &report::gof_report(&r, &cfg))
}

/// Size-resolved hypergraph degrees from authorship CSV text.
#[pyfunction]
fn hypergraph_profile(py: Python<'_>, authorship_csv: &str) -> PyResult<Py<PyAny>> {
    let b = parse_bipartite(authorship_csv.as_bytes()).map_err(value_error)?;
    let h = build_hypergraph(&b);
    to_py(py, &report::degree_profile_report(&h, &hyper_degrees(&h)))
}

#[pymodule]
#[pyo3(name = "netfiber")]
fn netfiber_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(core_numbers, m)?)?;
    m.add_function(wrap_pyfunction!(fit_beta, m)?)?;
    m.add_function(wrap_pyfunction!(fit_p1, m)?)?;
    m.add_function(wrap_pyfunction!(gof_beta, m)?)?;
    m.add_function(wrap_pyfunction!(gof_p1, m)?)?;
    m.add_function(wrap_pyfunction!(hypergraph_profile, m)?)?;
    Ok(())
}
