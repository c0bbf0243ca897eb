//! Command-line front end. [`run`] takes the arguments and output streams so
//! the binary is a thin wrapper and every command is testable in-process.
//!
//! Exit codes: 0 success, 1 a bound was violated, 2 bad input file,
//! 3 no vertex met the girth precondition, 64 usage error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::curvature_cd::cd_curvature;
use crate::curvature_cde::cde_estimate;
use crate::generators;
use crate::girth::{graph_girth, vertex_girth, GirthValue};
use crate::graph::{
    parse_edge_list, parse_edge_list_compacting, serialize_edge_list, Graph, Vertex,
};
use crate::verify::{verify, Theorem, VerifyOptions, DEFAULT_MIN_GIRTH};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "gammacurv",
    version,
    about = "Bakry-Emery curvature of finite graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TheoremArg {
    Cd,
    Cde,
    Both,
}

#[derive(Debug, clap::Args)]
struct Input {
    /// Edge-list file, or `-` for stdin
    file: PathBuf,
    /// Relabel sparse vertex ids to 0..n
    #[arg(long)]
    compact_ids: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Graph girth, optionally per vertex
    Girth {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        per_vertex: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Exact pointwise curvature under CD(K, N)
    CurvatureCd {
        #[command(flatten)]
        input: Input,
        /// Dimension N (> 0, `inf` allowed)
        #[arg(long, default_value_t = 2.0)]
        dim: f64,
        #[arg(long)]
        vertex: Option<Vertex>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Sampled CDE ratio minimum per vertex
    CurvatureCde {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 2.0)]
        dim: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        vertex: Option<Vertex>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Check the girth-five CD and CDE bounds at every vertex
    Verify {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "both")]
        theorem: TheoremArg,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Gate every vertex on the girth of the whole graph
        #[arg(long)]
        strict_global_girth: bool,
        /// Girth floor for the precondition
        #[arg(long, default_value_t = DEFAULT_MIN_GIRTH)]
        min_girth: usize,
    },
    /// Write a generated graph as an edge list
    Gen {
        /// path, cycle, star, complete, petersen, random-tree, random-girth
        family: String,
        params: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MIN_GIRTH)]
        min_girth: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Input(String),
}

fn read_graph(input: &Input) -> Result<Graph, Failure> {
    let mut text = String::new();
    let read = if input.file.as_os_str() == "-" {
        io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(&input.file).map(|t| text = t)
    };
    read.map_err(|e| Failure::Input(format!("{}: {e}", input.file.display())))?;
    let parsed = if input.compact_ids {
        parse_edge_list_compacting(&text).map(|(g, _)| g)
    } else {
        parse_edge_list(&text)
    };
    parsed.map_err(|e| Failure::Input(format!("{}: {e}", input.file.display())))
}

fn check_dim(dim: f64) -> Result<(), Failure> {
    if dim > 0.0 {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--dim must be positive, got {dim}")))
    }
}

fn selected(g: &Graph, vertex: Option<Vertex>) -> Result<Vec<Vertex>, Failure> {
    match vertex {
        Some(v) if v >= g.vertex_count() => Err(Failure::Usage(format!(
            "--vertex {v} out of range (graph has {} vertices)",
            g.vertex_count()
        ))),
        Some(v) => Ok(vec![v]),
        None => Ok(g.vertices().collect()),
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct GirthReport {
    girth: GirthValue,
    #[serde(skip_serializing_if = "Option::is_none")]
    per_vertex: Option<Vec<VertexGirth>>,
}

#[derive(Serialize)]
struct VertexGirth {
    vertex: Vertex,
    girth: GirthValue,
}

#[derive(Serialize)]
struct CdRecord {
    vertex: Vertex,
    degree: usize,
    curvature: f64,
}

#[derive(Serialize)]
struct CdReport {
    dim: f64,
    vertices: Vec<CdRecord>,
}

#[derive(Serialize)]
struct CdeRecord {
    vertex: Vertex,
    degree: usize,
    sampled_min: f64,
    samples_used: usize,
    seed: u64,
    /// `(vertex, value)` over the two-ball.
    argmin: Vec<(Vertex, f64)>,
}

#[derive(Serialize)]
struct CdeReport {
    dim: f64,
    samples: usize,
    seed: u64,
    vertices: Vec<CdeRecord>,
}

fn girth_cmd(g: &Graph, per_vertex: bool, format: Format) -> String {
    let total = graph_girth(g);
    let per: Option<Vec<VertexGirth>> = per_vertex.then(|| {
        g.vertices()
            .map(|v| VertexGirth {
                vertex: v,
                girth: vertex_girth(g, v),
            })
            .collect()
    });
    let mut out = String::new();
    match format {
        Format::Json => {
            return json(&GirthReport {
                girth: total,
                per_vertex: per,
            })
        }
        Format::Text => {
            writeln!(out, "{total}").unwrap();
            for r in per.iter().flatten() {
                writeln!(out, "{} {}", r.vertex, r.girth).unwrap();
            }
        }
        Format::Csv => match per {
            Some(rows) => {
                out.push_str("vertex,girth\n");
                for r in rows {
                    writeln!(out, "{},{}", r.vertex, r.girth).unwrap();
                }
            }
            None => writeln!(out, "girth\n{total}").unwrap(),
        },
    }
    out
}

fn cd_cmd(g: &Graph, dim: f64, vertices: Vec<Vertex>, format: Format) -> Result<String, Failure> {
    let records = vertices
        .into_par_iter()
        .map(|x| {
            cd_curvature(g, x, dim).map(|r| CdRecord {
                vertex: x,
                degree: g.degree(x),
                curvature: r.curvature_k,
            })
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::Input(e.to_string()))?;
    Ok(match format {
        Format::Csv | Format::Text => {
            let mut out = String::from("vertex,degree,curvature\n");
            for r in &records {
                writeln!(out, "{},{},{:?}", r.vertex, r.degree, r.curvature).unwrap();
            }
            out
        }
        Format::Json => json(&CdReport {
            dim,
            vertices: records,
        }),
    })
}

fn cde_cmd(
    g: &Graph,
    dim: f64,
    samples: usize,
    seed: u64,
    vertices: Vec<Vertex>,
    format: Format,
) -> Result<String, Failure> {
    let records = vertices
        .into_par_iter()
        .map(|x| {
            cde_estimate(g, x, dim, samples, seed).map(|e| {
                let f = &e.argmin.function;
                let mut argmin: Vec<(Vertex, f64)> = g
                    .ball(x, crate::graph::BallRadius::Two)
                    .vertices()
                    .map(|v| (v, f[v]))
                    .collect();
                argmin.sort_by_key(|p| p.0);
                CdeRecord {
                    vertex: x,
                    degree: g.degree(x),
                    sampled_min: e.sampled_min,
                    samples_used: e.samples_used,
                    seed: e.seed,
                    argmin,
                }
            })
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::Input(e.to_string()))?;
    Ok(match format {
        Format::Csv | Format::Text => {
            let mut out = String::from("vertex,degree,sampled_min,samples_used,seed\n");
            for r in &records {
                writeln!(
                    out,
                    "{},{},{:?},{},{}",
                    r.vertex, r.degree, r.sampled_min, r.samples_used, r.seed
                )
                .unwrap();
            }
            out
        }
        Format::Json => json(&CdeReport {
            dim,
            samples,
            seed,
            vertices: records,
        }),
    })
}

fn gen_cmd(family: &str, params: &[usize], seed: u64, min_girth: usize) -> Result<Graph, Failure> {
    let want = |n: usize| {
        if params.len() == n {
            Ok(())
        } else {
            Err(Failure::Usage(format!(
                "family {family} takes {n} parameter(s), got {}",
                params.len()
            )))
        }
    };
    let usage = |e: generators::GenError| Failure::Usage(e.to_string());
    match family {
        "path" => want(1).and_then(|_| generators::path(params[0]).map_err(usage)),
        "cycle" => want(1).and_then(|_| generators::cycle(params[0]).map_err(usage)),
        "star" => want(1).and_then(|_| generators::star(params[0]).map_err(usage)),
        "complete" => want(1).and_then(|_| generators::complete(params[0]).map_err(usage)),
        "petersen" => want(0).map(|_| generators::petersen()),
        "random-tree" => {
            want(1).and_then(|_| generators::random_tree(params[0], seed).map_err(usage))
        }
        "random-girth" => want(2).and_then(|_| {
            generators::random_with_girth(params[0], params[1], min_girth, seed)
                .map(|r| r.graph)
                .map_err(usage)
        }),
        other => Err(Failure::Usage(format!("unknown family {other:?}"))),
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let write = |out: &mut dyn Write, s: &str| {
        out.write_all(s.as_bytes())
            .map_err(|e| Failure::Input(format!("write failed: {e}")))
    };
    match cli.command {
        Command::Girth {
            input,
            per_vertex,
            format,
        } => {
            let g = read_graph(&input)?;
            write(out, &girth_cmd(&g, per_vertex, format))?;
            Ok(EXIT_OK)
        }
        Command::CurvatureCd {
            input,
            dim,
            vertex,
            format,
        } => {
            check_dim(dim)?;
            let g = read_graph(&input)?;
            let vs = selected(&g, vertex)?;
            write(out, &cd_cmd(&g, dim, vs, format)?)?;
            Ok(EXIT_OK)
        }
        Command::CurvatureCde {
            input,
            dim,
            samples,
            seed,
            vertex,
            format,
        } => {
            check_dim(dim)?;
            if samples == 0 {
                return Err(Failure::Usage("--samples must be at least 1".into()));
            }
            let g = read_graph(&input)?;
            let vs = selected(&g, vertex)?;
            write(out, &cde_cmd(&g, dim, samples, seed, vs, format)?)?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            input,
            theorem,
            samples,
            seed,
            strict_global_girth,
            min_girth,
        } => {
            if samples == 0 && theorem != TheoremArg::Cd {
                return Err(Failure::Usage("--samples must be at least 1".into()));
            }
            if min_girth < 3 {
                return Err(Failure::Usage("--min-girth must be at least 3".into()));
            }
            let g = read_graph(&input)?;
            let opts = VerifyOptions {
                theorem: match theorem {
                    TheoremArg::Cd => Theorem::Cd,
                    TheoremArg::Cde => Theorem::Cde,
                    TheoremArg::Both => Theorem::Both,
                },
                samples,
                seed,
                min_girth,
                strict_global_girth,
            };
            let report = verify(&g, &opts).map_err(|e| Failure::Input(e.to_string()))?;
            write(out, &json(&report))?;
            Ok(report.exit_code())
        }
        Command::Gen {
            family,
            params,
            seed,
            min_girth,
            output,
        } => {
            let g = gen_cmd(&family, &params, seed, min_girth)?;
            let mut text = serialize_edge_list(&g);
            text.push('\n');
            match output {
                Some(path) => std::fs::write(&path, text)
                    .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?,
                None => write(out, &text)?,
            }
            Ok(EXIT_OK)
        }
    }
}

/// Runs the CLI and returns the process exit code. `args` includes the
/// program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "usage error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
    }
}
