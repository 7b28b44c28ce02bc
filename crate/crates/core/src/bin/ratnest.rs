use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ratnest::branchdecomp::{parse_decomposition, serialize_decomposition, validate, width};
use ratnest::genusreduce::{approx_bw_bounded_genus, GenusOutcome};
use ratnest::graph::parse_graph;
use ratnest::oracle::{describe, exact_bw, exhaustive_representativity, Kind, OracleMode};
use ratnest::pipeline::{
    eptas_bw, parse_near_embedding, pipeline, PipelineConfig, PipelineOutcome,
};
use ratnest::ratcatcher::{
    decide_planar_bw, parse_sphere_cut, planar_branchwidth, planar_decomposition_capped,
    serialize_sphere_cut, sphere_cut_decomposition, validate_sphere_cut,
};
use ratnest::surface::{parse_embedding, planar_embed, EmbeddedGraph, PlanarEmbedding};
use ratnest::vortex::{
    attach_vortices, normalize_vortex_boundary, parse_rendition, vortex_width_bound,
};
use ratnest::{Error, Result};

#[derive(Parser)]
#[command(
    name = "ratnest",
    version,
    about = "Branch-decompositions of graphs on surfaces"
)]
struct Cli {
    /// Write the produced artifact here instead of standard output.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide planar branchwidth at most k.
    BwPlanar {
        /// width to decide
        #[arg(long)]
        k: usize,
        input: PathBuf,
    },
    /// Optimal sphere-cut decomposition of a planar graph.
    Scd { input: PathBuf },
    /// Genus-cutting approximation: decomposition or lower-bound certificate.
    GenusApprox {
        /// width to certify or beat
        #[arg(long)]
        k: usize,
        input: PathBuf,
    },
    /// Attach the vortices of a sphere rendition to an optimal ground decomposition.
    VortexAttach { input: PathBuf },
    /// Decompose and merge a near-embedding.
    Pipeline {
        /// width to certify or beat
        #[arg(long)]
        k: usize,
        /// order of the excluded minor, for reporting
        #[arg(long, requires = "minor_genus")]
        minor_order: Option<usize>,
        /// Euler genus of the excluded minor, for reporting
        #[arg(long, requires = "minor_order")]
        minor_genus: Option<usize>,
        input: PathBuf,
    },
    /// Approximate branchwidth of a near-embedding.
    Eptas {
        /// target ratio slack, positive
        #[arg(long)]
        epsilon: f64,
        input: PathBuf,
    },
    /// Check a decomposition (or sphere-cut decomposition) against a graph.
    Validate {
        graph: PathBuf,
        decomposition: PathBuf,
    },
    /// Brute-force ground truth.
    Oracle {
        #[command(subcommand)]
        query: OracleQuery,
    },
    /// Print a seeded instance.
    Gen { kind: String, seed: u64 },
}

#[derive(Subcommand)]
enum OracleQuery {
    /// Exact branchwidth.
    Bw { input: PathBuf },
    /// Representativity of an embedding.
    Rep { input: PathBuf },
}

enum Verdict {
    Decomposition,
    Certificate,
}

struct Report {
    artifact: String,
    summary: String,
    verdict: Verdict,
}

impl Report {
    fn decomposition(artifact: String, summary: String) -> Self {
        Report {
            artifact,
            summary,
            verdict: Verdict::Decomposition,
        }
    }

    fn certificate(summary: String) -> Self {
        Report {
            artifact: String::new(),
            summary,
            verdict: Verdict::Certificate,
        }
    }
}

fn read(path: &PathBuf) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::input(format!("{}: {e}", path.display())))
}

fn has_rotation(text: &str) -> bool {
    starts_any(text, "r ")
}

/// Embedding from a file with rotations, else a planar embedding of the
/// edge list.
fn load_embedding(path: &PathBuf) -> Result<EmbeddedGraph> {
    let text = read(path)?;
    if has_rotation(&text) {
        return parse_embedding(&text);
    }
    match planar_embed(&parse_graph(&text)?) {
        PlanarEmbedding::Planar(rot) => EmbeddedGraph::new(rot),
        PlanarEmbedding::NonPlanar => Err(Error::input("graph is not planar")),
    }
}

/// Blank out `width` and `bound` trailer lines, keeping line numbers.
fn strip_trailers(text: &str) -> String {
    text.lines()
        .map(|l| {
            let t = l.trim_start();
            if t.starts_with("width ") || t.starts_with("bound ") {
                ""
            } else {
                l
            }
        })
        .fold(String::new(), |mut acc, l| {
            acc.push_str(l);
            acc.push('\n');
            acc
        })
}

fn starts_any(text: &str, head: &str) -> bool {
    text.lines().any(|l| l.trim_start().starts_with(head))
}

/// Graph of an edge list, embedding, rendition (normalized, as attached)
/// or near-embedding file.
fn load_graph(path: &PathBuf) -> Result<ratnest::graph::Graph> {
    let text = read(path)?;
    if starts_any(&text, "td ") {
        Ok(parse_near_embedding(&text)?.graph)
    } else if starts_any(&text, "vortex ") {
        Ok(normalize_vortex_boundary(&parse_rendition(&text)?)?
            .full_graph()?
            .graph)
    } else if has_rotation(&text) {
        Ok(parse_embedding(&text)?.graph().clone())
    } else {
        parse_graph(&text)
    }
}

fn run(command: Command) -> Result<Report> {
    match command {
        Command::BwPlanar { k, input } => {
            let e = load_embedding(&input)?;
            if decide_planar_bw(&e, k)? {
                let (w, bd) = planar_decomposition_capped(&e, k)?
                    .ok_or_else(|| Error::internal("decision and construction disagree"))?;
                let artifact = format!("{}width {w}\n", serialize_decomposition(&bd));
                Ok(Report::decomposition(artifact, format!("bw ≤ {k}\n")))
            } else {
                Ok(Report::certificate(format!("bw > {k}\n")))
            }
        }
        Command::Scd { input } => {
            let e = load_embedding(&input)?;
            let scd = sphere_cut_decomposition(&e)?;
            let w = width(&scd.bd, e.graph())?;
            let artifact = format!("{}width {w}\n", serialize_sphere_cut(&scd));
            let summary = match validate_sphere_cut(&scd, &e) {
                Ok(()) => format!("width {w}\n"),
                Err(d) => format!("width {w}\nnot sphere-cut: {d}\n"),
            };
            Ok(Report::decomposition(artifact, summary))
        }
        Command::GenusApprox { k, input } => {
            let e = load_embedding(&input)?;
            match approx_bw_bounded_genus(&e, k)? {
                GenusOutcome::LowerBound(c) => Ok(Report::certificate(format!(
                    "LB {} {:?}\n",
                    c.value, c.kind
                ))),
                GenusOutcome::Decomposition(d) => {
                    let artifact = format!(
                        "{}width {}\nbound {}\n",
                        serialize_decomposition(&d.bd),
                        d.width,
                        d.bound
                    );
                    Ok(Report::decomposition(
                        artifact,
                        format!("width {}\nbound {}\n", d.width, d.bound),
                    ))
                }
            }
        }
        Command::VortexAttach { input } => {
            let r = normalize_vortex_boundary(&parse_rendition(&read(&input)?)?)?;
            let bd = attach_vortices(&r)?;
            let w = width(&bd, &r.full_graph()?.graph)?;
            let bound = vortex_width_bound(planar_branchwidth(&r.ground)?, &r);
            let artifact = format!("{}width {w}\nbound {bound}\n", serialize_decomposition(&bd));
            Ok(Report::decomposition(
                artifact,
                format!("width {w}\nbound {bound}\n"),
            ))
        }
        Command::Pipeline {
            k,
            minor_order,
            minor_genus,
            input,
        } => {
            let mut config = PipelineConfig::new(k, 1.0)?;
            config.excluded_minor = minor_order.zip(minor_genus);
            let ne = parse_near_embedding(&read(&input)?)?;
            match pipeline(&ne, config.k)? {
                PipelineOutcome::LowerBound { bag, certificate } => {
                    Ok(Report::certificate(format!(
                        "LB {} {:?} bag {}\n",
                        certificate.value,
                        certificate.kind,
                        bag + 1
                    )))
                }
                PipelineOutcome::Decomposition { bd, ledger } => {
                    let w = width(&bd, &ne.graph)?;
                    let mut summary = ledger.to_string();
                    if let Some(form) = config.asymptotic_bound() {
                        let _ = writeln!(summary, "asymptotic {form}");
                    }
                    let artifact = format!("{}width {w}\n", serialize_decomposition(&bd));
                    Ok(Report::decomposition(artifact, summary))
                }
            }
        }
        Command::Eptas { epsilon, input } => {
            let ne = parse_near_embedding(&read(&input)?)?;
            let res = eptas_bw(&ne, epsilon)?;
            let mut summary = String::new();
            let _ = writeln!(summary, "bw {}", res.value);
            let _ = writeln!(summary, "lower {}", res.lower_bound);
            let _ = writeln!(summary, "upper {}", res.upper_bound);
            let _ = writeln!(summary, "additive {}", res.additive);
            let _ = writeln!(summary, "exact {}", res.exact);
            let _ = writeln!(summary, "ratio {:.4}", res.measured_ratio());
            summary.push_str(&res.ledger.to_string());
            let artifact = format!(
                "{}width {}\n",
                serialize_decomposition(&res.bd),
                res.upper_bound
            );
            Ok(Report::decomposition(artifact, summary))
        }
        Command::Validate {
            graph,
            decomposition,
        } => {
            let text = strip_trailers(&read(&decomposition)?);
            let has_nooses = text.lines().any(|l| l.trim_start().starts_with("noose "));
            let g = load_graph(&graph)?;
            let verdict = if has_nooses {
                let scd = parse_sphere_cut(&text)?;
                let e = load_embedding(&graph)?;
                validate_sphere_cut(&scd, &e).map(|()| width(&scd.bd, &g))
            } else {
                let bd = parse_decomposition(&text)?;
                validate(&bd, &g).map(|()| width(&bd, &g))
            };
            match verdict {
                Ok(w) => Ok(Report::decomposition(
                    String::new(),
                    format!("ok\nwidth {}\n", w?),
                )),
                Err(d) => Err(Error::input(format!("invalid decomposition: {d}"))),
            }
        }
        Command::Oracle { query } => match query {
            OracleQuery::Bw { input } => {
                let g = load_graph(&input)?;
                let res = exact_bw(&g, OracleMode::BranchAndBound)?;
                let artifact = format!(
                    "{}width {}\n",
                    serialize_decomposition(&res.optimal_bd),
                    res.exact_bw
                );
                Ok(Report::decomposition(
                    artifact,
                    format!("bw {}\n", res.exact_bw),
                ))
            }
            OracleQuery::Rep { input } => {
                let e = load_embedding(&input)?;
                let rep = match exhaustive_representativity(&e)? {
                    Some(r) => r.to_string(),
                    None => "inf".to_string(),
                };
                Ok(Report::decomposition(String::new(), format!("rep {rep}\n")))
            }
        },
        Command::Gen { kind, seed } => {
            let kind: Kind = kind.parse()?;
            Ok(Report::decomposition(describe(kind, seed)?, String::new()))
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("RATNEST_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| Error::input(format!("RATNEST_THREADS must be a number, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::internal(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let report = configure_threads().and_then(|()| run(cli.command));
    match report {
        Ok(report) => {
            match &cli.output {
                Some(path) => {
                    if let Err(e) = fs::write(path, &report.artifact) {
                        eprintln!("error: {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                    print!("{}", report.summary);
                }
                None => print!("{}{}", report.artifact, report.summary),
            }
            match report.verdict {
                Verdict::Decomposition => ExitCode::SUCCESS,
                Verdict::Certificate => ExitCode::from(2),
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
