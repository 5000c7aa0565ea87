//! Statistical analysis of citation and coauthorship networks.
//!
//! * [`ingest`]: authorship/citation CSVs → count networks, thresholded
//!   simple networks and citation contingency tables.
//! * [`graph`], [`kcore`]: simple (di)graphs, degree statistics, dyad census,
//!   undirected and in-degree core decompositions.
//! * [`hyper`]: authorship hypergraphs and size-resolved degrees.
//! * [`models`]: β and p1 maximum-likelihood fits and the Pearson statistic.
//! * [`exact`]: fiber random walks and exact goodness-of-fit tests.
//! * [`report`]: deterministic JSON reports.

pub mod exact;
pub mod graph;
pub mod hyper;
pub mod ingest;
pub mod kcore;
pub mod models;
pub mod report;

pub use graph::{DyadCensus, SimpleDigraph, SimpleGraph};
