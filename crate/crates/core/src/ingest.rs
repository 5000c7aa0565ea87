//! Raw authorship/citation CSV parsing and the count networks derived from it.
//!
//! Authorship rows are `author_id,paper_id[,area,journal]`; citation rows are
//! `citing_paper,cited_paper`. A header row is recognised by its first field
//! (`author_id` or `citing_paper`). Nodes are numbered in order of first
//! appearance, so every derived structure is a deterministic function of the
//! file contents.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::io::Read;

use thiserror::Error;

use crate::graph::{SimpleDigraph, SimpleGraph};

/// Category used when a citing paper has no area/journal metadata.
pub const UNKNOWN_CATEGORY: &str = "unknown";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: {reason}")]
    Malformed { line: u64, reason: String },
    #[error("input contains no data rows")]
    EmptyInput,
    #[error("unknown paper id {0:?}")]
    UnknownPaper(String),
    #[error("threshold must be ≥ 1")]
    ZeroThreshold,
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PaperMeta {
    pub area: String,
    pub journal: String,
}

#[derive(Debug, Clone, Default)]
pub struct AuthorPaperBipartite {
    authors: Vec<String>,
    papers: Vec<String>,
    author_index: HashMap<String, usize>,
    paper_index: HashMap<String, usize>,
    incidence: Vec<(usize, usize)>,
    seen: HashSet<(usize, usize)>,
    paper_meta: Vec<Option<PaperMeta>>,
    duplicates: usize,
}

impl AuthorPaperBipartite {
    /// Builds a bipartite structure from `(author, paper)` pairs, dropping duplicates.
    pub fn from_pairs<I, A, P>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (A, P)>,
        A: AsRef<str>,
        P: AsRef<str>,
    {
        let mut b = Self::default();
        for (a, p) in pairs {
            b.insert(a.as_ref(), p.as_ref());
        }
        b
    }

    fn insert(&mut self, author: &str, paper: &str) -> usize {
        let a = intern(&mut self.author_index, &mut self.authors, author);
        let before = self.papers.len();
        let p = intern(&mut self.paper_index, &mut self.papers, paper);
        if self.papers.len() > before {
            self.paper_meta.push(None);
        }
        if self.seen.insert((a, p)) {
            self.incidence.push((a, p));
        } else {
            self.duplicates += 1;
        }
        p
    }

    pub fn authors(&self) -> &[String] {
        &self.authors
    }

    pub fn papers(&self) -> &[String] {
        &self.papers
    }

    /// `(author index, paper index)` pairs in first-appearance order.
    pub fn incidence(&self) -> &[(usize, usize)] {
        &self.incidence
    }

    pub fn duplicate_rows(&self) -> usize {
        self.duplicates
    }

    pub fn paper_meta(&self, paper: usize) -> Option<&PaperMeta> {
        self.paper_meta[paper].as_ref()
    }

    pub fn author_id(&self, name: &str) -> Option<usize> {
        self.author_index.get(name).copied()
    }

    pub fn paper_id(&self, name: &str) -> Option<usize> {
        self.paper_index.get(name).copied()
    }

    /// Author set of every paper, each sorted ascending.
    pub fn paper_authors(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.papers.len()];
        for &(a, p) in &self.incidence {
            out[p].push(a);
        }
        for v in &mut out {
            v.sort_unstable();
        }
        out
    }
}

fn intern(index: &mut HashMap<String, usize>, names: &mut Vec<String>, key: &str) -> usize {
    if let Some(&i) = index.get(key) {
        return i;
    }
    let i = names.len();
    names.push(key.to_owned());
    index.insert(key.to_owned(), i);
    i
}

/// Paper-level citations, citing → cited. Self-citing papers and repeated
/// rows are dropped and counted.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PaperCitationDigraph {
    pub edges: Vec<(String, String)>,
    pub self_citations_dropped: usize,
    pub duplicates: usize,
}

impl PaperCitationDigraph {
    pub fn from_pairs<I, A, B>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (A, B)>,
        A: AsRef<str>,
        B: AsRef<str>,
    {
        let mut out = Self::default();
        let mut seen = HashSet::new();
        for (a, b) in pairs {
            let (a, b) = (a.as_ref(), b.as_ref());
            if a == b {
                out.self_citations_dropped += 1;
            } else if seen.insert((a.to_owned(), b.to_owned())) {
                out.edges.push((a.to_owned(), b.to_owned()));
            } else {
                out.duplicates += 1;
            }
        }
        out
    }
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader)
}

fn malformed(line: u64, reason: impl Into<String>) -> IngestError {
    IngestError::Malformed {
        line,
        reason: reason.into(),
    }
}

pub fn parse_bipartite<R: Read>(reader: R) -> Result<AuthorPaperBipartite, IngestError> {
    let mut b = AuthorPaperBipartite::default();
    let mut rows = 0usize;
    for (k, rec) in csv_reader(reader).records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(k as u64 + 1, |p| p.line());
        if k == 0 && rec.get(0) == Some("author_id") {
            continue;
        }
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != 2 && rec.len() != 4 {
            return Err(malformed(line, format!("expected 2 or 4 fields, found {}", rec.len())));
        }
        if rec.iter().any(str::is_empty) {
            return Err(malformed(line, "empty field"));
        }
        let p = b.insert(&rec[0], &rec[1]);
        if rec.len() == 4 {
            let meta = PaperMeta {
                area: rec[2].to_owned(),
                journal: rec[3].to_owned(),
            };
            match &b.paper_meta[p] {
                None => b.paper_meta[p] = Some(meta),
                Some(m) if *m == meta => {}
                Some(_) => {
                    return Err(malformed(
                        line,
                        format!("conflicting area/journal for paper {:?}", &rec[1]),
                    ))
                }
            }
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(IngestError::EmptyInput);
    }
    Ok(b)
}

pub fn parse_citations<R: Read>(reader: R) -> Result<PaperCitationDigraph, IngestError> {
    let mut pairs = Vec::new();
    for (k, rec) in csv_reader(reader).records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(k as u64 + 1, |p| p.line());
        if k == 0 && rec.get(0) == Some("citing_paper") {
            continue;
        }
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != 2 {
            return Err(malformed(line, format!("expected 2 fields, found {}", rec.len())));
        }
        if rec.iter().any(str::is_empty) {
            return Err(malformed(line, "empty field"));
        }
        pairs.push((rec[0].to_owned(), rec[1].to_owned()));
    }
    if pairs.is_empty() {
        return Err(IngestError::EmptyInput);
    }
    Ok(PaperCitationDigraph::from_pairs(pairs))
}

/// Integer citation counts between authors, keyed by ordered `(i, j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedDigraph {
    pub labels: Vec<String>,
    pub weights: BTreeMap<(usize, usize), u64>,
}

/// Integer coauthorship counts, keyed by `(i, j)` with `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    pub labels: Vec<String>,
    pub weights: BTreeMap<(usize, usize), u64>,
}

impl WeightedDigraph {
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn weight(&self, i: usize, j: usize) -> u64 {
        self.weights.get(&(i, j)).copied().unwrap_or(0)
    }

    /// Edge `i → j` iff `weight(i, j) ≥ c`. Isolated nodes are kept.
    pub fn threshold(&self, c: u64) -> Result<SimpleDigraph, IngestError> {
        if c == 0 {
            return Err(IngestError::ZeroThreshold);
        }
        let edges = self.weights.iter().filter(|(_, &w)| w >= c).map(|(&e, _)| e);
        Ok(SimpleDigraph::from_edges(self.labels.clone(), edges)
            .expect("weighted digraph has no diagonal keys"))
    }
}

impl WeightedGraph {
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn weight(&self, i: usize, j: usize) -> u64 {
        let key = if i < j { (i, j) } else { (j, i) };
        self.weights.get(&key).copied().unwrap_or(0)
    }

    pub fn threshold(&self, c: u64) -> Result<SimpleGraph, IngestError> {
        if c == 0 {
            return Err(IngestError::ZeroThreshold);
        }
        let edges = self.weights.iter().filter(|(_, &w)| w >= c).map(|(&e, _)| e);
        Ok(SimpleGraph::from_edges(self.labels.clone(), edges)
            .expect("weighted graph has no diagonal keys"))
    }
}

pub fn threshold_digraph(w: &WeightedDigraph, c: u64) -> Result<SimpleDigraph, IngestError> {
    w.threshold(c)
}

pub fn threshold_graph(w: &WeightedGraph, c: u64) -> Result<SimpleGraph, IngestError> {
    w.threshold(c)
}

/// Number of joint papers for every author pair.
pub fn coauthor_counts(b: &AuthorPaperBipartite) -> WeightedGraph {
    let mut weights = BTreeMap::new();
    for authors in b.paper_authors() {
        for (x, &i) in authors.iter().enumerate() {
            for &j in &authors[x + 1..] {
                *weights.entry((i, j)).or_insert(0) += 1;
            }
        }
    }
    WeightedGraph {
        labels: b.authors().to_vec(),
        weights,
    }
}

fn resolve_citations(
    b: &AuthorPaperBipartite,
    pc: &PaperCitationDigraph,
) -> Result<Vec<(usize, usize)>, IngestError> {
    pc.edges
        .iter()
        .map(|(s, t)| {
            let s = b.paper_id(s).ok_or_else(|| IngestError::UnknownPaper(s.clone()))?;
            let t = b.paper_id(t).ok_or_else(|| IngestError::UnknownPaper(t.clone()))?;
            Ok((s, t))
        })
        .collect()
}

/// Author-level citation counts. Each paper citation adds one to every
/// (citing author, cited author) pair; pairs with the same author are dropped.
pub fn author_citation_counts(
    b: &AuthorPaperBipartite,
    pc: &PaperCitationDigraph,
) -> Result<WeightedDigraph, IngestError> {
    let cites = resolve_citations(b, pc)?;
    let pa = b.paper_authors();
    let mut weights = BTreeMap::new();
    for (s, t) in cites {
        for &i in &pa[s] {
            for &j in &pa[t] {
                if i != j {
                    *weights.entry((i, j)).or_insert(0) += 1;
                }
            }
        }
    }
    Ok(WeightedDigraph {
        labels: b.authors().to_vec(),
        weights,
    })
}

/// Author × author × area × journal citation counts, categorised by the
/// citing paper's area and journal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CitationTable {
    pub authors: Vec<String>,
    pub areas: Vec<String>,
    pub journals: Vec<String>,
    pub entries: BTreeMap<(usize, usize, usize, usize), u64>,
}

impl CitationTable {
    /// `(I, J, K)`: authors, areas, journals.
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.authors.len(), self.areas.len(), self.journals.len())
    }

    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }
}

pub fn citation_table(
    b: &AuthorPaperBipartite,
    pc: &PaperCitationDigraph,
) -> Result<CitationTable, IngestError> {
    let cites = resolve_citations(b, pc)?;
    let pa = b.paper_authors();
    let mut area_index = HashMap::new();
    let mut areas = Vec::new();
    let mut journal_index = HashMap::new();
    let mut journals = Vec::new();
    // category numbering follows paper order, not citation order
    let mut paper_cat = Vec::with_capacity(b.papers().len());
    for p in 0..b.papers().len() {
        let (area, journal) = match b.paper_meta(p) {
            Some(m) => (m.area.as_str(), m.journal.as_str()),
            None => (UNKNOWN_CATEGORY, UNKNOWN_CATEGORY),
        };
        paper_cat.push((area.to_owned(), journal.to_owned()));
    }
    let citing: BTreeSet<usize> = cites.iter().map(|&(s, _)| s).collect();
    for &s in &citing {
        let (a, j) = &paper_cat[s];
        intern(&mut area_index, &mut areas, a);
        intern(&mut journal_index, &mut journals, j);
    }
    let mut entries = BTreeMap::new();
    for (s, t) in cites {
        let (a, j) = &paper_cat[s];
        let (a, j) = (area_index[a], journal_index[j]);
        for &i in &pa[s] {
            for &k in &pa[t] {
                if i != k {
                    *entries.entry((i, k, a, j)).or_insert(0) += 1;
                }
            }
        }
    }
    Ok(CitationTable {
        authors: b.authors().to_vec(),
        areas,
        journals,
        entries,
    })
}

/// Sums a citation table over area and journal.
pub fn collapse_table(t: &CitationTable) -> WeightedDigraph {
    let mut weights = BTreeMap::new();
    for (&(i, k, _, _), &c) in &t.entries {
        if c > 0 {
            *weights.entry((i, k)).or_insert(0) += c;
        }
    }
    WeightedDigraph {
        labels: t.authors.clone(),
        weights,
    }
}
