//! Loading input CSVs and deriving the network a subcommand works on.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use netfiber::graph::largest_connected_component;
use netfiber::ingest::{
    author_citation_counts, coauthor_counts, parse_bipartite, parse_citations, AuthorPaperBipartite,
    PaperCitationDigraph,
};
use netfiber::{SimpleDigraph, SimpleGraph};
use serde_json::{json, Value};

use crate::manifest::{InputFile, RunManifest};
use crate::CliError;

/// File names looked up inside `--data`.
pub const AUTHORSHIP_FILE: &str = "authorship.csv";
pub const CITATIONS_FILE: &str = "citations.csv";

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Directory holding authorship.csv and (optionally) citations.csv.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Authorship CSV: author_id,paper_id[,area,journal]. Overrides --data.
    #[arg(long)]
    pub authorship: Option<PathBuf>,
    /// Paper citation CSV: citing_paper,cited_paper. Overrides --data.
    #[arg(long)]
    pub citations: Option<PathBuf>,
}

pub struct Loaded {
    pub bipartite: AuthorPaperBipartite,
    pub citations: Option<PaperCitationDigraph>,
}

impl InputArgs {
    fn resolve(&self) -> Result<(PathBuf, Option<PathBuf>), CliError> {
        let authorship = match (&self.authorship, &self.data) {
            (Some(p), _) => p.clone(),
            (None, Some(d)) => d.join(AUTHORSHIP_FILE),
            (None, None) => return Err(CliError::Usage("an input is required: pass --data or --authorship".into())),
        };
        let citations = match (&self.citations, &self.data) {
            (Some(p), _) => Some(p.clone()),
            (None, Some(d)) if d.join(CITATIONS_FILE).exists() => Some(d.join(CITATIONS_FILE)),
            _ => None,
        };
        Ok((authorship, citations))
    }

    /// Reads and parses the inputs, recording each file in the manifest.
    pub fn load(&self, manifest: &mut RunManifest) -> Result<Loaded, CliError> {
        let (authorship, citations) = self.resolve()?;
        let read = |p: &PathBuf| InputFile::read(p).map_err(|e| CliError::Data(format!("{}: {e}", p.display())));
        let af = read(&authorship)?;
        manifest.add_input("authorship", &af);
        let bipartite = parse_bipartite(af.bytes.as_slice()).map_err(|e| CliError::Data(format!("{}: {e}", af.path)))?;
        let citations = match citations {
            Some(p) => {
                let cf = read(&p)?;
                manifest.add_input("citations", &cf);
                Some(parse_citations(cf.bytes.as_slice()).map_err(|e| CliError::Data(format!("{}: {e}", cf.path)))?)
            }
            None => None,
        };
        Ok(Loaded { bipartite, citations })
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetworkKind {
    /// Author citation digraph: i → j when i cites j at least c times.
    Citation,
    /// Coauthorship graph: {i, j} when they share at least c papers.
    Coauthor,
}

impl NetworkKind {
    fn name(self) -> &'static str {
        match self {
            Self::Citation => "citation",
            Self::Coauthor => "coauthor",
        }
    }
}

pub fn parse_threshold(s: &str) -> Result<u64, String> {
    match s.parse::<u64>() {
        Ok(0) => Err("threshold must be ≥ 1".into()),
        Ok(c) => Ok(c),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Args, Debug, Clone)]
pub struct NetworkArgs {
    /// Which author network to derive.
    #[arg(long, value_enum)]
    pub network: Option<NetworkKind>,
    /// Minimum citation (or shared-paper) count for an edge.
    #[arg(long, visible_alias = "c", default_value = "1", value_parser = parse_threshold)]
    pub threshold: u64,
    /// Restrict to the largest (weakly) connected component.
    #[arg(long)]
    pub lcc: bool,
}

pub enum Net {
    Directed(SimpleDigraph),
    Undirected(SimpleGraph),
}

impl Net {
    pub fn node_count(&self) -> usize {
        match self {
            Net::Directed(d) => d.node_count(),
            Net::Undirected(g) => g.node_count(),
        }
    }

    pub fn edge_count(&self) -> usize {
        match self {
            Net::Directed(d) => d.edge_count(),
            Net::Undirected(g) => g.edge_count(),
        }
    }
}

impl NetworkArgs {
    pub fn kind_or(&self, default: NetworkKind) -> NetworkKind {
        self.network.unwrap_or(default)
    }

    pub fn config(&self, kind: NetworkKind) -> Value {
        json!({ "network": kind.name(), "threshold": self.threshold, "lcc": self.lcc })
    }

    /// Builds the thresholded network, optionally cut to its largest component.
    pub fn build(&self, kind: NetworkKind, data: &Loaded) -> Result<Net, CliError> {
        let data_err = |e: &dyn std::fmt::Display| CliError::Data(e.to_string());
        let net = match kind {
            NetworkKind::Citation => {
                let pc = data.citations.as_ref().ok_or_else(|| {
                    CliError::Usage("the citation network needs --citations (or citations.csv in --data)".into())
                })?;
                let w = author_citation_counts(&data.bipartite, pc).map_err(|e| data_err(&e))?;
                Net::Directed(w.threshold(self.threshold).map_err(|e| data_err(&e))?)
            }
            NetworkKind::Coauthor => {
                let w = coauthor_counts(&data.bipartite);
                Net::Undirected(w.threshold(self.threshold).map_err(|e| data_err(&e))?)
            }
        };
        if !self.lcc {
            return Ok(net);
        }
        Ok(match net {
            Net::Directed(d) => Net::Directed(largest_connected_component(&d).map_err(|e| data_err(&e))?),
            Net::Undirected(g) => Net::Undirected(largest_connected_component(&g).map_err(|e| data_err(&e))?),
        })
    }

    pub fn summary(&self, kind: NetworkKind, net: &Net) -> Value {
        json!({
            "kind": kind.name(),
            "directed": matches!(net, Net::Directed(_)),
            "threshold": self.threshold,
            "largest_component": self.lcc,
            "connectivity": "weak",
            "nodes": net.node_count(),
            "edges": net.edge_count(),
        })
    }
}
