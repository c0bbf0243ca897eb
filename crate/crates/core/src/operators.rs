//! Normalized Laplacian and the gamma calculus on an unweighted graph.
//!
//! The Laplacian is `Δf(x) = (1/d_x) Σ_{y~x} (f(y) − f(x))`. Two-point
//! differences follow `f(x, y) = f(y) − f(x)` everywhere.
//!
//! Each operator has a definitional evaluation that composes Laplacians
//! exactly as the operator is defined (`Γ(f,g) = ½(Δ(fg) − fΔg − gΔf)`,
//! `Γ₂(f) = ½ΔΓ(f) − Γ(f,Δf)` and so on). `Γ`, `Γ₂` and `Γ(f, Γ(f)/f)` also
//! have closed local formulas written as explicit sums over the one- and
//! two-ball. The two routes share no code beyond reading `f` and the
//! adjacency, so each serves as an oracle for the other.
//!
//! Pointwise evaluations only touch the ball the operator actually depends
//! on. The `*_field` functions materialize an operator on every vertex.

use thiserror::Error;

use crate::graph::{BallRadius, Graph, Vertex, VertexFunction};

/// Deepest `Γᵢ` that [`gamma_iterate`] will evaluate; the recursion cost
/// grows exponentially in `i`.
pub const MAX_GAMMA_ITERATION: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("gamma iteration depth {0} exceeds the maximum of {MAX_GAMMA_ITERATION}")]
    IterationTooDeep(usize),
    #[error("function value {value} at vertex {vertex} is not positive")]
    NonpositiveValue { vertex: Vertex, value: f64 },
}

type Field<'a> = &'a dyn Fn(Vertex) -> f64;

fn lap_at(g: &Graph, f: Field, x: Vertex) -> f64 {
    let fx = f(x);
    let ns = g.neighbors(x);
    ns.iter().map(|&y| f(y) - fx).sum::<f64>() / ns.len() as f64
}

fn gamma_at(g: &Graph, f: Field, h: Field, x: Vertex) -> f64 {
    let fh = |v: Vertex| f(v) * h(v);
    0.5 * (lap_at(g, &fh, x) - f(x) * lap_at(g, h, x) - h(x) * lap_at(g, f, x))
}

fn gamma2_at(g: &Graph, f: Field, x: Vertex) -> f64 {
    let gamma_f = |v: Vertex| gamma_at(g, f, f, v);
    let lap_f = |v: Vertex| lap_at(g, f, v);
    0.5 * lap_at(g, &gamma_f, x) - gamma_at(g, f, &lap_f, x)
}

fn gamma_iter_at(g: &Graph, f: Field, h: Field, x: Vertex, i: usize) -> f64 {
    if i == 0 {
        return f(x) * h(x);
    }
    let prev = |v: Vertex| gamma_iter_at(g, f, h, v, i - 1);
    let lap_f = |v: Vertex| lap_at(g, f, v);
    let lap_h = |v: Vertex| lap_at(g, h, v);
    0.5 * (lap_at(g, &prev, x)
        - gamma_iter_at(g, f, &lap_h, x, i - 1)
        - gamma_iter_at(g, &lap_f, h, x, i - 1))
}

/// `Δf(x)`.
pub fn laplacian(g: &Graph, f: &VertexFunction, x: Vertex) -> f64 {
    lap_at(g, &|v| f[v], x)
}

/// `Γ(f, h)(x) = ½(Δ(fh) − fΔh − hΔf)(x)`.
pub fn gamma(g: &Graph, f: &VertexFunction, h: &VertexFunction, x: Vertex) -> f64 {
    gamma_at(g, &|v| f[v], &|v| h[v], x)
}

/// `Γ(f)(x) = (1/(2 d_x)) Σ_{y~x} (f(y) − f(x))²`.
pub fn gamma_local(g: &Graph, f: &VertexFunction, x: Vertex) -> f64 {
    let ns = g.neighbors(x);
    let fx = f[x];
    ns.iter().map(|&y| (f[y] - fx).powi(2)).sum::<f64>() / (2.0 * ns.len() as f64)
}

/// `Γᵢ(f, h)(x)` by the recursion `Γ₀(f,h) = fh`,
/// `Γᵢ₊₁(f,h) = ½(ΔΓᵢ(f,h) − Γᵢ(f,Δh) − Γᵢ(Δf,h))`.
pub fn gamma_iterate(
    g: &Graph,
    f: &VertexFunction,
    h: &VertexFunction,
    x: Vertex,
    i: usize,
) -> Result<f64, OperatorError> {
    if i > MAX_GAMMA_ITERATION {
        return Err(OperatorError::IterationTooDeep(i));
    }
    Ok(gamma_iter_at(g, &|v| f[v], &|v| h[v], x, i))
}

/// `Γ₂(f)(x) = ½ΔΓ(f)(x) − Γ(f, Δf)(x)`.
pub fn gamma2(g: &Graph, f: &VertexFunction, x: Vertex) -> f64 {
    gamma2_at(g, &|v| f[v], x)
}

/// Local two-ball formula
/// `Γ₂(f)(x) = ½((Δf)²(x) + (1/d_x) Σ_{y~x} (1/d_y) Σ_{z~y} (f(y,z)² − ½ f(x,z)²))`.
/// The inner sum includes `z = x`.
pub fn gamma2_local(g: &Graph, f: &VertexFunction, x: Vertex) -> f64 {
    let fx = f[x];
    let ns = g.neighbors(x);
    let mut lap = 0.0;
    let mut outer = 0.0;
    for &y in ns {
        let fy = f[y];
        lap += fy - fx;
        let inner: f64 = g
            .neighbors(y)
            .iter()
            .map(|&z| (f[z] - fy).powi(2) - 0.5 * (f[z] - fx).powi(2))
            .sum();
        outer += inner / g.degree(y) as f64;
    }
    let dx = ns.len() as f64;
    lap /= dx;
    0.5 * (lap * lap + outer / dx)
}

fn check_positive_on_ball(g: &Graph, f: &VertexFunction, x: Vertex) -> Result<(), OperatorError> {
    let ball = g.ball(x, BallRadius::Two);
    let bad = ball.vertices().find(|&v| f[v] <= 0.0);
    match bad {
        Some(v) => Err(OperatorError::NonpositiveValue {
            vertex: v,
            value: f[v],
        }),
        None => Ok(()),
    }
}

/// `Γ(f, Γ(f)/f)(x)` evaluated definitionally: the ratio function is formed
/// pointwise from [`gamma`] and fed back into it. Requires `f > 0` on the
/// two-ball of `x`.
pub fn gamma_f_ratio(g: &Graph, f: &VertexFunction, x: Vertex) -> Result<f64, OperatorError> {
    check_positive_on_ball(g, f, x)?;
    Ok(gamma_f_ratio_unchecked(g, f, x))
}

/// [`gamma_f_ratio`] without the positivity check, for callers that already
/// guarantee it.
pub(crate) fn gamma_f_ratio_unchecked(g: &Graph, f: &VertexFunction, x: Vertex) -> f64 {
    let fv = |v: Vertex| f[v];
    let ratio = |v: Vertex| gamma_at(g, &fv, &fv, v) / f[v];
    gamma_at(g, &fv, &ratio, x)
}

/// The three parts of `Γ(f, Γ(f)/f)(x) = I₁ − I₂ − I₃`, each from local sums:
///
/// * `I₁ = ½ ΔΓ(f)(x)`
/// * `I₂ = ½ f(x) Δ(Γ(f)/f)(x)`
/// * `I₃ = ½ (Γ(f)(x)/f(x)) Δf(x)`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioSplit {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
}

impl RatioSplit {
    pub fn value(&self) -> f64 {
        self.i1 - self.i2 - self.i3
    }
}

/// Second evaluation path for [`gamma_f_ratio`].
pub fn gamma_f_ratio_split(
    g: &Graph,
    f: &VertexFunction,
    x: Vertex,
) -> Result<RatioSplit, OperatorError> {
    check_positive_on_ball(g, f, x)?;
    let fx = f[x];
    let ns = g.neighbors(x);
    let mu_x = 1.0 / ns.len() as f64;
    let gamma_x = gamma_local(g, f, x);

    let mut sum_gamma_diff = 0.0;
    let mut sum_ratio_diff = 0.0;
    let mut sum_f_diff = 0.0;
    for &y in ns {
        // Γ(f)(y) = ½ μ_y Σ_{z~y} f(y,z)²
        let fy = f[y];
        let gamma_y = 0.5
            * g.neighbors(y)
                .iter()
                .map(|&z| (f[z] - fy).powi(2))
                .sum::<f64>()
            / g.degree(y) as f64;
        sum_gamma_diff += gamma_y - gamma_x;
        sum_ratio_diff += gamma_y / fy - gamma_x / fx;
        sum_f_diff += fy - fx;
    }
    Ok(RatioSplit {
        i1: 0.5 * mu_x * sum_gamma_diff,
        i2: 0.5 * fx * mu_x * sum_ratio_diff,
        i3: 0.5 * (gamma_x / fx) * mu_x * sum_f_diff,
    })
}

/// `Δf` on every vertex.
pub fn laplacian_field(g: &Graph, f: &VertexFunction) -> VertexFunction {
    VertexFunction::from_vec_unchecked(
        g.vertices()
            .map(|x| {
                let ns = g.neighbors(x);
                ns.iter().map(|&y| f[y] - f[x]).sum::<f64>() / ns.len() as f64
            })
            .collect(),
    )
}

/// `Γ(f, h)` on every vertex, built from whole-graph Laplacians.
pub fn gamma_field(g: &Graph, f: &VertexFunction, h: &VertexFunction) -> VertexFunction {
    let fh = f.zip_with(h, |a, b| a * b);
    let (lfh, lh, lf) = (
        laplacian_field(g, &fh),
        laplacian_field(g, h),
        laplacian_field(g, f),
    );
    VertexFunction::from_vec_unchecked(
        g.vertices()
            .map(|v| 0.5 * (lfh[v] - f[v] * lh[v] - h[v] * lf[v]))
            .collect(),
    )
}

/// `Γ₂(f)` on every vertex, built from whole-graph fields.
pub fn gamma2_field(g: &Graph, f: &VertexFunction) -> VertexFunction {
    let lap_gamma = laplacian_field(g, &gamma_field(g, f, f));
    let cross = gamma_field(g, f, &laplacian_field(g, f));
    lap_gamma.zip_with(&cross, |a, b| 0.5 * a - b)
}
