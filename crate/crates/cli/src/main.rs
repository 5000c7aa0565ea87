//! `netfiber` command-line front end. Every subcommand loads its inputs,
//! calls the library, and prints one JSON report (DOT for `export-dot`)
//! with the run manifest embedded.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data errors.

mod input;
mod manifest;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use netfiber::exact::{
    exact_gof_test_digraph, exact_gof_test_graph, run_parallel_chains, FiberWalkConfig, DEFAULT_MAX_MOVE_EDGES,
};
use netfiber::hyper::{build_hypergraph, graph_projection, hyper_degrees, top_k_by_collaborators};
use netfiber::ingest::{author_citation_counts, citation_table, coauthor_counts};
use netfiber::kcore::{core_decomposition, directed_core_in, innermost_core, top_k_by_core_degree};
use netfiber::models::{fit_beta, fit_p1, Reciprocity};
use netfiber::report;
use netfiber::{SimpleDigraph, SimpleGraph};
use serde_json::{json, Value};

use input::{InputArgs, Net, NetworkArgs, NetworkKind};
use manifest::RunManifest;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "netfiber", version, about = "Citation and coauthorship network analysis: cores, hypergraph degrees, beta/p1 fits and exact goodness-of-fit tests")]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Record wall-clock time in the manifest (makes output non-reproducible).
    #[arg(long, global = true)]
    record_time: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse the inputs and summarise the derived count networks.
    Ingest {
        #[command(flatten)]
        input: InputArgs,
        /// Also summarise the author × author × area × journal citation table.
        #[arg(long)]
        table: bool,
    },
    /// Threshold a count network into a simple network.
    Threshold {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        net: NetworkArgs,
        /// List the edges by label.
        #[arg(long)]
        edges: bool,
    },
    /// Core decomposition and innermost-core ranking.
    Cores {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        net: NetworkArgs,
        #[arg(long, value_enum, default_value = "directed-in")]
        mode: ModeArg,
        /// Rank this many innermost-core nodes by in-core degree.
        #[arg(long)]
        top: Option<usize>,
    },
    /// Degree sequences (and the dyad census for digraphs).
    Degrees {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        net: NetworkArgs,
    },
    /// Authorship hypergraph: size-resolved degrees and collaborator ranking.
    Hyper {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 10)]
        top: usize,
        /// Count only papers with at least this many authors in the ranking.
        #[arg(long, default_value_t = 1)]
        min_size: usize,
    },
    /// Fit the beta model to an undirected network.
    FitBeta {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        net: NetworkArgs,
        #[command(flatten)]
        fit: FitArgs,
    },
    /// Fit a p1 model to the citation digraph.
    FitP1 {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        net: NetworkArgs,
        #[arg(long, value_enum, default_value = "dyadic")]
        rho: RhoArg,
        #[command(flatten)]
        fit: FitArgs,
    },
    /// Exact goodness-of-fit test by a random walk on the fiber.
    Gof {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        net: NetworkArgs,
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long, value_enum, default_value = "dyadic")]
        rho: RhoArg,
        #[command(flatten)]
        fit: FitArgs,
        #[arg(long, default_value_t = 100_000)]
        steps: usize,
        /// Steps discarded before sampling (default: a tenth of --steps).
        #[arg(long)]
        burn_in: Option<usize>,
        #[arg(long, default_value_t = 1)]
        thin: usize,
        #[arg(long, env = "NETFIBER_SEED", default_value_t = 0)]
        seed: u64,
        /// Independent chains run concurrently; chain c uses seed + c.
        #[arg(long, default_value_t = 1)]
        chains: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_MOVE_EDGES)]
        max_move_edges: usize,
        /// Write the sampled statistics here as little-endian f64.
        #[arg(long)]
        samples_out: Option<PathBuf>,
    },
    /// Export a network, its innermost core, or the hypergraph as DOT.
    ExportDot {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        net: NetworkArgs,
        #[arg(long, value_enum, default_value = "network")]
        what: DotArg,
    },
}

#[derive(Args, Debug, Clone)]
struct FitArgs {
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum ModeArg {
    Undirected,
    DirectedIn,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum RhoArg {
    Zero,
    Constant,
    Dyadic,
}

impl From<RhoArg> for Reciprocity {
    fn from(r: RhoArg) -> Self {
        match r {
            RhoArg::Zero => Reciprocity::Zero,
            RhoArg::Constant => Reciprocity::Constant,
            RhoArg::Dyadic => Reciprocity::Dyadic,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum ModelArg {
    Beta,
    P1,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum DotArg {
    Network,
    Core,
    Hypergraph,
}

fn value_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value().map(|p| p.get_name().to_owned()).unwrap_or_default()
}

fn directed(net: Net, why: &str) -> Result<SimpleDigraph, CliError> {
    match net {
        Net::Directed(d) => Ok(d),
        Net::Undirected(_) => Err(CliError::Usage(format!("{why} needs a directed network (--network citation)"))),
    }
}

fn undirected(net: Net) -> SimpleGraph {
    match net {
        Net::Directed(d) => d.to_undirected(),
        Net::Undirected(g) => g,
    }
}

fn labelled<T: Into<Value>>(labels: &[String], values: impl IntoIterator<Item = T>) -> Value {
    Value::Object(labels.iter().cloned().zip(values.into_iter().map(Into::into)).collect())
}

/// What a subcommand produces: a JSON result or DOT text.
enum Output {
    Json(Value),
    Dot(String),
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let rt = cli.record_time;
    let (name, manifest, output) = match &cli.command {
        Command::Ingest { input, table } => {
            let mut m = RunManifest::new("ingest", json!({ "table": table }), None, rt);
            let data = input.load(&mut m)?;
            let b = &data.bipartite;
            let with_meta = (0..b.papers().len()).filter(|&p| b.paper_meta(p).is_some()).count();
            let coauthor = coauthor_counts(b);
            let mut result = json!({
                "authors": b.authors().len(),
                "papers": b.papers().len(),
                "papers_with_metadata": with_meta,
                "authorship_pairs": b.incidence().len(),
                "duplicate_rows": b.duplicate_rows(),
                "coauthor_pairs": coauthor.weights.len(),
                "coauthor_weight_total": coauthor.weights.values().sum::<u64>(),
            });
            if let Some(pc) = &data.citations {
                let w = author_citation_counts(b, pc).map_err(|e| CliError::Data(e.to_string()))?;
                result["paper_citations"] = json!({
                    "edges": pc.edges.len(),
                    "self_citations_dropped": pc.self_citations_dropped,
                    "duplicate_rows": pc.duplicates,
                });
                result["author_citations"] = json!({
                    "ordered_pairs": w.weights.len(),
                    "total": w.weights.values().sum::<u64>(),
                });
                if *table {
                    let t = citation_table(b, pc).map_err(|e| CliError::Data(e.to_string()))?;
                    let (i, j, k) = t.dims();
                    result["citation_table"] = json!({
                        "dims": [i, i, j, k],
                        "areas": t.areas,
                        "journals": t.journals,
                        "nonzero_cells": t.entries.len(),
                        "total": t.total(),
                    });
                }
            } else if *table {
                return Err(CliError::Usage("--table needs citation data".into()));
            }
            ("ingest", m, Output::Json(result))
        }
        Command::Threshold { input, net, edges } => {
            let kind = net.kind_or(NetworkKind::Citation);
            let mut config = net.config(kind);
            config["edges"] = json!(edges);
            let mut m = RunManifest::new("threshold", config, None, rt);
            let data = input.load(&mut m)?;
            let g = net.build(kind, &data)?;
            let mut result = json!({ "network": net.summary(kind, &g) });
            match &g {
                Net::Directed(d) => {
                    result["isolated"] = json!((0..d.node_count()).filter(|&v| d.in_degree(v) + d.out_degree(v) == 0).count());
                    result["dyad_census"] = report::census_report(&d.dyad_census());
                    if *edges {
                        let e: Vec<[&str; 2]> = d.edges().map(|(u, v)| [d.label(u), d.label(v)]).collect();
                        result["edge_list"] = json!(e);
                    }
                }
                Net::Undirected(u) => {
                    result["isolated"] = json!((0..u.node_count()).filter(|&v| u.degree(v) == 0).count());
                    if *edges {
                        let e: Vec<[&str; 2]> = u.edges().map(|(a, b)| [u.label(a), u.label(b)]).collect();
                        result["edge_list"] = json!(e);
                    }
                }
            }
            ("threshold", m, Output::Json(result))
        }
        Command::Cores { input, net, mode, top } => {
            let kind = net.kind_or(match mode {
                ModeArg::DirectedIn => NetworkKind::Citation,
                ModeArg::Undirected => NetworkKind::Coauthor,
            });
            let mut config = net.config(kind);
            config["mode"] = json!(value_name(mode));
            config["top"] = json!(top);
            let mut m = RunManifest::new("cores", config, None, rt);
            let data = input.load(&mut m)?;
            let g = net.build(kind, &data)?;
            let summary = net.summary(kind, &g);
            let rank_err = |e: netfiber::kcore::RankingError| match e {
                netfiber::kcore::RankingError::ZeroK => CliError::Usage(e.to_string()),
                _ => CliError::Data(e.to_string()),
            };
            let mut result = match mode {
                ModeArg::DirectedIn => {
                    let d = directed(g, "--mode directed-in")?;
                    let c = directed_core_in(&d);
                    let ranking = top.map(|k| top_k_by_core_degree(&c, &d, k)).transpose().map_err(rank_err)?;
                    let inner = innermost_core(&c, &d).map_err(|e| CliError::Data(e.to_string()))?;
                    let mut r = report::core_report(&c, d.labels(), ranking.as_ref());
                    r["innermost_core_edges"] = json!(inner.subgraph.edge_count());
                    r
                }
                ModeArg::Undirected => {
                    let u = undirected(g);
                    let c = core_decomposition(&u);
                    let ranking = top.map(|k| top_k_by_core_degree(&c, &u, k)).transpose().map_err(rank_err)?;
                    let inner = innermost_core(&c, &u).map_err(|e| CliError::Data(e.to_string()))?;
                    let mut r = report::core_report(&c, u.labels(), ranking.as_ref());
                    r["innermost_core_edges"] = json!(inner.subgraph.edge_count());
                    r
                }
            };
            result["network"] = summary;
            ("cores", m, Output::Json(result))
        }
        Command::Degrees { input, net } => {
            let kind = net.kind_or(NetworkKind::Citation);
            let mut m = RunManifest::new("degrees", net.config(kind), None, rt);
            let data = input.load(&mut m)?;
            let g = net.build(kind, &data)?;
            let mut result = json!({ "network": net.summary(kind, &g) });
            match &g {
                Net::Directed(d) => {
                    let (ins, outs) = d.in_out_degrees();
                    result["in_degree"] = labelled(d.labels(), ins);
                    result["out_degree"] = labelled(d.labels(), outs);
                    result["dyad_census"] = report::census_report(&d.dyad_census());
                }
                Net::Undirected(u) => {
                    result["degree"] = labelled(u.labels(), u.degrees());
                }
            }
            ("degrees", m, Output::Json(result))
        }
        Command::Hyper { input, top, min_size } => {
            let config = json!({ "top": top, "min_size": min_size });
            let mut m = RunManifest::new("hyper", config, None, rt);
            let data = input.load(&mut m)?;
            let h = build_hypergraph(&data.bipartite);
            let profile = hyper_degrees(&h);
            let ranking = top_k_by_collaborators(&h, *min_size, *top).map_err(|e| CliError::Usage(e.to_string()))?;
            let projection = graph_projection(&h);
            let mut result = report::degree_profile_report(&h, &profile);
            result["ranking"] = json!({ "min_size": min_size, "entries": ranking });
            result["projection"] = json!({ "nodes": projection.node_count(), "edges": projection.edge_count() });
            ("hyper", m, Output::Json(result))
        }
        Command::FitBeta { input, net, fit } => {
            let kind = net.kind_or(NetworkKind::Coauthor);
            let mut config = net.config(kind);
            config["tol"] = json!(fit.tol);
            config["max_iter"] = json!(fit.max_iter);
            let mut m = RunManifest::new("fit-beta", config, None, rt);
            let data = input.load(&mut m)?;
            let g = net.build(kind, &data)?;
            let summary = net.summary(kind, &g);
            let g = undirected(g);
            let b = fit_beta(&g, fit.tol, fit.max_iter).map_err(|e| CliError::Data(e.to_string()))?;
            let result = json!({ "network": summary, "fit": report::beta_fit_report(&b) });
            ("fit-beta", m, Output::Json(result))
        }
        Command::FitP1 { input, net, rho, fit } => {
            let kind = net.kind_or(NetworkKind::Citation);
            let mut config = net.config(kind);
            config["rho"] = json!(value_name(rho));
            config["tol"] = json!(fit.tol);
            config["max_iter"] = json!(fit.max_iter);
            let mut m = RunManifest::new("fit-p1", config, None, rt);
            let data = input.load(&mut m)?;
            let g = net.build(kind, &data)?;
            let summary = net.summary(kind, &g);
            let d = directed(g, "fit-p1")?;
            let p = fit_p1(&d, (*rho).into(), fit.tol, fit.max_iter).map_err(|e| CliError::Data(e.to_string()))?;
            let result = json!({ "network": summary, "fit": report::p1_fit_report(&p) });
            ("fit-p1", m, Output::Json(result))
        }
        Command::Gof {
            input,
            net,
            model,
            rho,
            fit,
            steps,
            burn_in,
            thin,
            seed,
            chains,
            max_move_edges,
            samples_out,
        } => {
            let kind = net.kind_or(match model {
                ModelArg::Beta => NetworkKind::Coauthor,
                ModelArg::P1 => NetworkKind::Citation,
            });
            let cfg = FiberWalkConfig {
                n_steps: *steps,
                burn_in: burn_in.unwrap_or(steps / 10),
                thin: *thin,
                seed: *seed,
                max_move_edges: *max_move_edges,
            };
            cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
            if *chains == 0 {
                return Err(CliError::Usage("--chains must be at least 1".into()));
            }
            let mut config = net.config(kind);
            config["model"] = json!(value_name(model));
            if let ModelArg::P1 = model {
                config["rho"] = json!(value_name(rho));
            }
            config["tol"] = json!(fit.tol);
            config["max_iter"] = json!(fit.max_iter);
            config["walk"] = json!(cfg);
            config["chains"] = json!(chains);
            config["samples_out"] = json!(samples_out.as_ref().map(|p| p.display().to_string()));
            let mut m = RunManifest::new("gof", config, Some(*seed), rt);
            let data = input.load(&mut m)?;
            let g = net.build(kind, &data)?;
            let summary = net.summary(kind, &g);
            let data_err = |e: &dyn std::fmt::Display| CliError::Data(e.to_string());
            let (fit_report, res) = match model {
                ModelArg::Beta => {
                    let g = undirected(g);
                    let b = fit_beta(&g, fit.tol, fit.max_iter).map_err(|e| data_err(&e))?;
                    let res = run_parallel_chains(&cfg, *chains, |c| exact_gof_test_graph(&g, &b, c))
                        .map_err(|e| data_err(&e))?;
                    (report::beta_fit_report(&b), res)
                }
                ModelArg::P1 => {
                    let d = directed(g, "--model p1")?;
                    let variant = (*rho).into();
                    let p = fit_p1(&d, variant, fit.tol, fit.max_iter).map_err(|e| data_err(&e))?;
                    let res = run_parallel_chains(&cfg, *chains, |c| exact_gof_test_digraph(&d, &p, variant, c))
                        .map_err(|e| data_err(&e))?;
                    (report::p1_fit_report(&p), res)
                }
            };
            if let Some(path) = samples_out {
                let f = std::fs::File::create(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
                res.write_samples_le(std::io::BufWriter::new(f))
                    .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            }
            let result = json!({ "network": summary, "fit": fit_report, "test": report::gof_report(&res, &cfg) });
            ("gof", m, Output::Json(result))
        }
        Command::ExportDot { input, net, what } => {
            let kind = net.kind_or(NetworkKind::Citation);
            let mut config = net.config(kind);
            config["what"] = json!(value_name(what));
            let mut m = RunManifest::new("export-dot", config, None, rt);
            let data = input.load(&mut m)?;
            let dot = match what {
                DotArg::Hypergraph => build_hypergraph(&data.bipartite).to_dot(),
                DotArg::Network => match net.build(kind, &data)? {
                    Net::Directed(d) => d.to_dot(),
                    Net::Undirected(u) => u.to_dot(),
                },
                DotArg::Core => {
                    let inner = |e: netfiber::graph::GraphError| CliError::Data(e.to_string());
                    match net.build(kind, &data)? {
                        Net::Directed(d) => innermost_core(&directed_core_in(&d), &d).map_err(inner)?.subgraph.to_dot(),
                        Net::Undirected(u) => innermost_core(&core_decomposition(&u), &u).map_err(inner)?.subgraph.to_dot(),
                    }
                }
            };
            ("export-dot", m, Output::Dot(dot))
        }
    };
    debug_assert_eq!(manifest.to_value()["command"], name);
    let text = match output {
        Output::Json(result) => {
            let doc = json!({ "manifest": manifest.to_value(), "result": result });
            report::to_json_string(&doc)
        }
        Output::Dot(dot) => {
            // DOT has no metadata slot, so the manifest rides along as a comment
            let line = serde_json::to_string(&manifest.to_value()).expect("manifest serializes");
            format!("// netfiber manifest: {line}\n{dot}")
        }
    };
    Ok(text)
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Data(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Data(format!("stdout: {e}"))),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = run(&cli).and_then(|text| emit(&text, cli.out.as_ref()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("netfiber: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
