//! Per-vertex verification of the two girth-five curvature bounds.
//!
//! At a vertex `x` whose two-ball is a tree (vertex girth at least 5), with
//! neighbor degrees `k_i`:
//!
//! * CD with dimension 2 holds with `K = min_i (2 − k_i)/k_i`;
//! * CDE with dimension 2 holds with `K = −d_x/2 − 1`.
//!
//! The CD side is compared against the exact curvature from
//! [`cd_curvature`]. The CDE side is checked by falsification search with
//! [`cde_estimate`]. A vertex only fails when the violating function also
//! fails a from-scratch check built on whole-graph operator fields.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::curvature_cd::{cd_curvature, CurvatureError};
use crate::curvature_cde::{cde_estimate, CdeError};
use crate::girth::{graph_girth, vertex_girth, GirthValue};
use crate::graph::{BallRadius, Graph, Vertex, VertexFunction};
use crate::operators::{gamma2_field, gamma_field, laplacian_field};

/// Dimension used by both bounds.
pub const THEOREM_DIMENSION: f64 = 2.0;
/// Margins at or above this count as satisfied.
pub const MARGIN_TOLERANCE: f64 = -1e-8;
/// Girth floor that makes every two-ball a tree.
pub const DEFAULT_MIN_GIRTH: usize = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("vertex {vertex} has girth {girth}, below {required}")]
    PreconditionFailed {
        vertex: Vertex,
        girth: GirthValue,
        required: usize,
    },
    #[error("vertex {vertex} has no neighbor with index {index}")]
    NoSuchNeighbor { vertex: Vertex, index: usize },
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error(transparent)]
    Cde(#[from] CdeError),
}

/// `min_i (2 − k_i)/k_i` over the neighbor degrees `k_i` of `x`.
pub fn cd_bound_girth5(g: &Graph, x: Vertex) -> f64 {
    g.neighbors(x)
        .iter()
        .map(|&y| {
            let k = g.degree(y) as f64;
            (2.0 - k) / k
        })
        .fold(f64::INFINITY, f64::min)
}

/// `−d_x/2 − 1`.
pub fn cde_bound_girth5(g: &Graph, x: Vertex) -> f64 {
    -(g.degree(x) as f64) / 2.0 - 1.0
}

/// Block of neighbor `y = N_x[i]` in the local `Γ₂` sum, evaluated on the
/// extremal function: `f(x) = 0`, `f(y) = 1`, `f(z) = 2` on the other
/// neighbors of `y`, zero elsewhere. The result is
/// `(1/k) Σ_{z~y} ((f(z) − f(y))² − ½ f(z)²) = −(k − 2)/k`.
pub fn cd_witness_value(g: &Graph, x: Vertex, i: usize) -> Result<f64, VerifyError> {
    let girth = vertex_girth(g, x);
    if !girth.is_at_least(DEFAULT_MIN_GIRTH) {
        return Err(VerifyError::PreconditionFailed {
            vertex: x,
            girth,
            required: DEFAULT_MIN_GIRTH,
        });
    }
    let y = *g.neighbors(x).get(i).ok_or(VerifyError::NoSuchNeighbor {
        vertex: x,
        index: i,
    })?;
    let mut f = vec![0.0_f64; g.vertex_count()];
    f[y] = 1.0;
    for &z in g.neighbors(y) {
        if z != x {
            f[z] = 2.0;
        }
    }
    let sum: f64 = g
        .neighbors(y)
        .iter()
        .map(|&z| (f[z] - f[y]).powi(2) - 0.5 * (f[z] - f[x]).powi(2))
        .sum();
    Ok(sum / g.degree(y) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    Cd,
    Cde,
    Both,
}

impl Theorem {
    fn cd(self) -> bool {
        matches!(self, Theorem::Cd | Theorem::Both)
    }

    fn cde(self) -> bool {
        matches!(self, Theorem::Cde | Theorem::Both)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub theorem: Theorem,
    pub samples: usize,
    pub seed: u64,
    pub min_girth: usize,
    /// Gate every vertex on the graph girth instead of its own girth.
    pub strict_global_girth: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            theorem: Theorem::Both,
            samples: 10_000,
            seed: 0,
            min_girth: DEFAULT_MIN_GIRTH,
            strict_global_girth: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    PreconditionNotMet,
}

/// A function violating one of the bounds, re-checked independently.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub condition: Theorem,
    /// `(vertex, value)` on the two-ball.
    pub function: Vec<(Vertex, f64)>,
    /// Left side minus right side of the inequality at the bound; negative.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexRecord {
    pub vertex: Vertex,
    pub girth: GirthValue,
    pub neighbor_degrees: Vec<usize>,
    pub cd_bound: f64,
    pub cd_computed: Option<f64>,
    pub cd_margin: Option<f64>,
    pub cde_bound: f64,
    pub cde_sampled_min: Option<f64>,
    pub cde_margin: Option<f64>,
    pub verdict: Verdict,
    pub seed: u64,
    pub dim: f64,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureReport {
    pub theorem: Theorem,
    pub dim: f64,
    pub seed: u64,
    pub samples: usize,
    pub min_girth: usize,
    pub strict_global_girth: bool,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub graph_girth: GirthValue,
    pub vertices: Vec<VertexRecord>,
}

impl CurvatureReport {
    pub fn count(&self, verdict: Verdict) -> usize {
        self.vertices
            .iter()
            .filter(|r| r.verdict == verdict)
            .count()
    }

    /// 1 if any vertex fails, 3 if no vertex meets the precondition, else 0.
    pub fn exit_code(&self) -> i32 {
        if self.count(Verdict::Fail) > 0 {
            1
        } else if self.count(Verdict::PreconditionNotMet) == self.vertices.len() {
            3
        } else {
            0
        }
    }
}

fn restrict_to_ball(g: &Graph, x: Vertex, f: &VertexFunction) -> Vec<(Vertex, f64)> {
    let ball = g.ball(x, BallRadius::Two);
    let mut out: Vec<(Vertex, f64)> = ball.vertices().map(|v| (v, f[v])).collect();
    out.sort_by_key(|p| p.0);
    out
}

/// `Γ₂(f) − ½(Δf)² − K Γ(f)` at `x`, from whole-graph fields.
fn cd_slack_from_fields(g: &Graph, x: Vertex, k: f64, f: &VertexFunction) -> f64 {
    let lap = laplacian_field(g, f)[x];
    gamma2_field(g, f)[x] - lap * lap / THEOREM_DIMENSION - k * gamma_field(g, f, f)[x]
}

/// `Γ₂(f) − Γ(f, Γ(f)/f) − ½(Δf)² − K Γ(f)` at `x`, from whole-graph fields.
fn cde_slack_from_fields(g: &Graph, x: Vertex, k: f64, f: &VertexFunction) -> f64 {
    let grad = gamma_field(g, f, f);
    let ratio = grad.zip_with(f, |a, b| a / b);
    let lap = laplacian_field(g, f)[x];
    gamma2_field(g, f)[x]
        - gamma_field(g, f, &ratio)[x]
        - lap * lap / THEOREM_DIMENSION
        - k * grad[x]
}

fn verify_vertex(
    g: &Graph,
    x: Vertex,
    opts: &VerifyOptions,
    global_girth: GirthValue,
) -> Result<VertexRecord, VerifyError> {
    let girth = vertex_girth(g, x);
    let gate = if opts.strict_global_girth {
        global_girth
    } else {
        girth
    };
    let precondition = gate.is_at_least(opts.min_girth);
    let cd_bound = cd_bound_girth5(g, x);
    let cde_bound = cde_bound_girth5(g, x);
    let mut witness = None;
    let mut ok = true;

    let (mut cd_computed, mut cd_margin) = (None, None);
    if opts.theorem.cd() {
        let r = cd_curvature(g, x, THEOREM_DIMENSION)?;
        let margin = r.curvature_k - cd_bound;
        cd_computed = Some(r.curvature_k);
        cd_margin = Some(margin);
        if precondition && margin < MARGIN_TOLERANCE {
            let slack = cd_slack_from_fields(g, x, cd_bound, &r.minimizing_function);
            if slack < 0.0 {
                ok = false;
                witness = Some(Witness {
                    condition: Theorem::Cd,
                    function: restrict_to_ball(g, x, &r.minimizing_function),
                    slack,
                });
            } else {
                log::warn!(
                    "vertex {x}: CD margin {margin:e} but witness slack {slack:e} is not negative"
                );
            }
        } else if precondition && margin < 0.0 {
            log::info!("vertex {x}: tight CD margin {margin:e}");
        }
    }

    let (mut cde_sampled_min, mut cde_margin) = (None, None);
    if opts.theorem.cde() {
        let e = cde_estimate(g, x, THEOREM_DIMENSION, opts.samples, opts.seed)?;
        let margin = e.sampled_min - cde_bound;
        cde_sampled_min = Some(e.sampled_min);
        cde_margin = Some(margin);
        if precondition && margin < MARGIN_TOLERANCE {
            let f = &e.argmin.function;
            let slack = cde_slack_from_fields(g, x, cde_bound, f);
            if slack < 0.0 {
                ok = false;
                witness.get_or_insert(Witness {
                    condition: Theorem::Cde,
                    function: restrict_to_ball(g, x, f),
                    slack,
                });
            } else {
                log::warn!(
                    "vertex {x}: CDE margin {margin:e} but witness slack {slack:e} is not negative"
                );
            }
        } else if precondition && margin < 0.0 {
            log::info!("vertex {x}: tight CDE margin {margin:e}");
        }
    }

    let verdict = match (precondition, ok) {
        (false, _) => Verdict::PreconditionNotMet,
        (true, true) => Verdict::Pass,
        (true, false) => Verdict::Fail,
    };
    Ok(VertexRecord {
        vertex: x,
        girth,
        neighbor_degrees: g.neighbors(x).iter().map(|&y| g.degree(y)).collect(),
        cd_bound,
        cd_computed,
        cd_margin,
        cde_bound,
        cde_sampled_min,
        cde_margin,
        verdict,
        seed: opts.seed,
        dim: THEOREM_DIMENSION,
        witness,
    })
}

/// Verifies the selected bounds at every vertex, in parallel. Records come
/// back ordered by vertex id.
pub fn verify(g: &Graph, opts: &VerifyOptions) -> Result<CurvatureReport, VerifyError> {
    let global = graph_girth(g);
    let vertices = g
        .vertices()
        .into_par_iter()
        .map(|x| verify_vertex(g, x, opts, global))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CurvatureReport {
        theorem: opts.theorem,
        dim: THEOREM_DIMENSION,
        seed: opts.seed,
        samples: opts.samples,
        min_girth: opts.min_girth,
        strict_global_girth: opts.strict_global_girth,
        vertex_count: g.vertex_count(),
        edge_count: g.edge_count(),
        graph_girth: global,
        vertices,
    })
}

pub fn verify_cd_theorem(g: &Graph) -> Result<CurvatureReport, VerifyError> {
    verify(
        g,
        &VerifyOptions {
            theorem: Theorem::Cd,
            ..Default::default()
        },
    )
}

pub fn verify_cde_theorem(
    g: &Graph,
    samples: usize,
    seed: u64,
) -> Result<CurvatureReport, VerifyError> {
    verify(
        g,
        &VerifyOptions {
            theorem: Theorem::Cde,
            samples,
            seed,
            ..Default::default()
        },
    )
}
