//! Exact pointwise curvature under the curvature-dimension condition
//! `Γ₂(f)(x) ≥ (1/n)(Δf)²(x) + K Γ(f)(x)`.
//!
//! Both sides are quadratic in `f` and only depend on the two-ball of `x`.
//! With `f(x) = 0` (everything is invariant under adding a constant) the
//! optimal `K` is the infimum of the Rayleigh-type ratio `fᵀAf / fᵀBf`. `B`
//! vanishes on the second sphere, so those coordinates are first minimized
//! away with a Schur complement; what remains is `B = I/(2 d_x)` on the first
//! sphere, and `K = 2 d_x λ_min`.

use thiserror::Error;

use crate::graph::{BallRadius, Graph, LocalBall, Vertex, VertexFunction};
use crate::operators::{gamma, gamma2, laplacian};
use crate::spectra::{schur_minimize, smallest_eigenvalue, SpectraError, SymMatrix};

/// Slack allowed by [`cd_check`].
pub const CHECK_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurvatureError {
    #[error("dimension must be positive, got {0}")]
    InvalidDimension(f64),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}

/// `1/n`, with `n = ∞` giving zero.
pub(crate) fn inverse_dimension(n: f64) -> Result<f64, CurvatureError> {
    if n > 0.0 {
        Ok(1.0 / n)
    } else {
        Err(CurvatureError::InvalidDimension(n))
    }
}

/// Quadratic forms over the coordinates of a two-ball, `f(x) = 0`.
#[derive(Debug, Clone)]
pub struct CdForms {
    /// `f ↦ Γ₂(f)(x) − (1/n)(Δf(x))²`
    pub a: SymMatrix,
    /// `f ↦ Γ(f)(x)`
    pub b: SymMatrix,
    pub ball: LocalBall,
}

pub fn assemble_cd_forms(g: &Graph, x: Vertex, n: f64) -> Result<CdForms, CurvatureError> {
    let inv_n = inverse_dimension(n)?;
    let ball = g.ball(x, BallRadius::Two);
    let dim = ball.dim();
    let mu_x = 1.0 / g.degree(x) as f64;
    let mut a = SymMatrix::zeros(dim);
    let mut b = SymMatrix::zeros(dim);

    // (½ − 1/n)(Δf)², with Δf(x) = μ_x Σ_y f(y).
    let lap: Vec<(usize, f64)> = (0..ball.first_sphere().len()).map(|i| (i, mu_x)).collect();
    a.add_square(0.5 - inv_n, &lap);

    // ½ μ_x Σ_y μ_y Σ_{z~y} (f(y,z)² − ½ f(x,z)²); the center has no coordinate.
    let coord = |v: Vertex| if v == x { None } else { ball.coordinate(v) };
    for (iy, &y) in ball.first_sphere().iter().enumerate() {
        let w = 0.5 * mu_x / g.degree(y) as f64;
        for &z in g.neighbors(y) {
            match coord(z) {
                Some(iz) => {
                    a.add_square(w, &[(iz, 1.0), (iy, -1.0)]);
                    a.add(iz, iz, -0.5 * w);
                }
                None => a.add(iy, iy, w),
            }
        }
        b.add(iy, iy, 0.5 * mu_x);
    }
    Ok(CdForms { a, b, ball })
}

/// Optimal pointwise curvature and a function attaining it.
#[derive(Debug, Clone)]
pub struct CdResult {
    pub vertex: Vertex,
    pub dimension_n: f64,
    pub curvature_k: f64,
    /// Minimizer, zero at the center and outside the two-ball, with `Γ(f)(x) = 1/(2 d_x)`.
    pub minimizing_function: VertexFunction,
}

/// Largest `K` such that the curvature-dimension inequality with dimension
/// `n` holds at `x` for every function. `n = f64::INFINITY` drops the
/// `(Δf)²` term.
pub fn cd_curvature(g: &Graph, x: Vertex, n: f64) -> Result<CdResult, CurvatureError> {
    let forms = assemble_cd_forms(g, x, n)?;
    let first = forms.ball.first_sphere().len();
    let keep: Vec<usize> = (0..first).collect();
    let reduction = schur_minimize(&forms.a, &keep)?;
    let eig = smallest_eigenvalue(&reduction.complement)?;
    let coords = reduction.minimizer(&eig.vector);

    let mut values = vec![0.0; g.vertex_count()];
    for (i, c) in coords.into_iter().enumerate() {
        values[forms.ball.vertex_at(i)] = c;
    }
    Ok(CdResult {
        vertex: x,
        dimension_n: n,
        curvature_k: 2.0 * g.degree(x) as f64 * eig.value,
        minimizing_function: VertexFunction::from_vec_unchecked(values),
    })
}

/// `Γ₂(f)(x) − (1/n)(Δf)²(x) − K Γ(f)(x)` from the definitional operators.
pub fn cd_slack(g: &Graph, x: Vertex, n: f64, k: f64, f: &VertexFunction) -> f64 {
    let inv_n = if n.is_infinite() { 0.0 } else { 1.0 / n };
    gamma2(g, f, x) - inv_n * laplacian(g, f, x).powi(2) - k * gamma(g, f, f, x)
}

/// Whether the curvature-dimension inequality holds at `x` for this `f`,
/// up to [`CHECK_TOLERANCE`].
pub fn cd_check(g: &Graph, x: Vertex, n: f64, k: f64, f: &VertexFunction) -> bool {
    cd_slack(g, x, n, k, f) + CHECK_TOLERANCE >= 0.0
}
