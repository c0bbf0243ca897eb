//! Small dense symmetric matrices: cyclic Jacobi eigensolver and Schur
//! elimination of a positive-definite block.

use thiserror::Error;

/// Smallest accepted Cholesky pivot when eliminating a block.
pub const PIVOT_FLOOR: f64 = 1e-12;
const JACOBI_TOLERANCE: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectraError {
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix has dimension zero")]
    EmptyMatrix,
    #[error("eliminated block is not positive definite (pivot {0:e})")]
    NotEliminable(f64),
    #[error("index {0} is out of range or repeated")]
    BadIndex(usize),
    #[error("Jacobi iteration did not converge in {JACOBI_MAX_SWEEPS} sweeps")]
    NoConvergence,
}

/// Dense symmetric matrix stored row-major. Writes go through [`SymMatrix::add`]
/// or [`SymMatrix::set`], which update both triangles.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        SymMatrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Builds from the upper triangle of `f(i, j)` (`i <= j`).
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
        self.data[j * self.dim + i] = v;
    }

    /// Adds `v` to entry `(i, j)` and its mirror (once on the diagonal).
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] += v;
        if i != j {
            self.data[j * self.dim + i] += v;
        }
    }

    /// Adds `c · (aᵀf)²` where `a` is given as sparse `(index, coefficient)` pairs.
    pub fn add_square(&mut self, c: f64, a: &[(usize, f64)]) {
        for &(i, ai) in a {
            for &(j, aj) in a {
                self.data[i * self.dim + j] += c * ai * aj;
            }
        }
    }

    pub fn quadratic_form(&self, u: &[f64]) -> f64 {
        let n = self.dim;
        (0..n)
            .map(|i| u[i] * (0..n).map(|j| self.data[i * n + j] * u[j]).sum::<f64>())
            .sum()
    }

    pub fn mul_vec(&self, u: &[f64]) -> Vec<f64> {
        let n = self.dim;
        (0..n)
            .map(|i| (0..n).map(|j| self.data[i * n + j] * u[j]).sum())
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn shifted(&self, c: f64) -> Self {
        let mut m = self.clone();
        for i in 0..self.dim {
            m.data[i * self.dim + i] += c;
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|a| a.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub value: f64,
    /// Unit-norm eigenvector.
    pub vector: Vec<f64>,
}

/// All eigenpairs by cyclic Jacobi rotations, sorted by ascending eigenvalue
/// (ties keep their column order).
pub fn symmetric_eigen(m: &SymMatrix) -> Result<Vec<Eigenpair>, SpectraError> {
    if m.dim == 0 {
        return Err(SpectraError::EmptyMatrix);
    }
    if !m.is_finite() {
        return Err(SpectraError::NonFinite);
    }
    let n = m.dim;
    let mut a = m.data.clone();
    let mut v = SymMatrix::identity(n).data;

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].powi(2))
            .sum::<f64>()
            .sqrt();
        let diag: f64 = (0..n).map(|i| a[i * n + i].powi(2)).sum::<f64>().sqrt();
        if off == 0.0 || off < JACOBI_TOLERANCE * diag {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(SpectraError::NoConvergence);
    }

    let mut pairs: Vec<Eigenpair> = (0..n)
        .map(|j| {
            let mut vector: Vec<f64> = (0..n).map(|k| v[k * n + j]).collect();
            let norm = vector.iter().map(|x| x * x).sum::<f64>().sqrt();
            vector.iter_mut().for_each(|x| *x /= norm);
            Eigenpair {
                value: a[j * n + j],
                vector,
            }
        })
        .collect();
    pairs.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(pairs)
}

/// Smallest eigenvalue with a unit eigenvector.
pub fn smallest_eigenvalue(m: &SymMatrix) -> Result<Eigenpair, SpectraError> {
    Ok(symmetric_eigen(m)?.swap_remove(0))
}

/// Result of eliminating the non-kept coordinates of a quadratic form.
#[derive(Debug, Clone)]
pub struct SchurReduction {
    /// `M_kk − M_ke M_ee⁻¹ M_ek`, indexed in the order of `keep`.
    pub complement: SymMatrix,
    keep: Vec<usize>,
    eliminated: Vec<usize>,
    /// `M_ee⁻¹ M_ek`, row per eliminated coordinate.
    coupling: Vec<Vec<f64>>,
    dim: usize,
}

impl SchurReduction {
    pub fn keep(&self) -> &[usize] {
        &self.keep
    }

    pub fn eliminated(&self) -> &[usize] {
        &self.eliminated
    }

    /// Full vector `[u; w*]` with `w* = −M_ee⁻¹ M_ek u`, the minimizer of the
    /// form over eliminated coordinates for fixed kept values `u`.
    pub fn minimizer(&self, u: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.dim];
        for (&k, &uk) in self.keep.iter().zip(u) {
            full[k] = uk;
        }
        for (&e, row) in self.eliminated.iter().zip(&self.coupling) {
            full[e] = -row.iter().zip(u).map(|(r, x)| r * x).sum::<f64>();
        }
        full
    }
}

/// Cholesky factor of `P M Pᵀ` with diagonal pivoting.
struct PivotedCholesky {
    lower: Vec<Vec<f64>>,
    perm: Vec<usize>,
}

impl PivotedCholesky {
    fn factor(m: &[Vec<f64>]) -> Result<Self, SpectraError> {
        let n = m.len();
        let mut a: Vec<Vec<f64>> = m.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut lower = vec![vec![0.0; n]; n];
        for k in 0..n {
            let (piv, &best) = (k..n)
                .map(|i| (i, &a[i][i]))
                .max_by(|x, y| x.1.total_cmp(y.1))
                .unwrap();
            if best.is_nan() || best <= PIVOT_FLOOR {
                return Err(SpectraError::NotEliminable(best));
            }
            a.swap(k, piv);
            for row in a.iter_mut() {
                row.swap(k, piv);
            }
            perm.swap(k, piv);
            lower.swap(k, piv);
            let d = a[k][k].sqrt();
            lower[k][k] = d;
            for i in k + 1..n {
                lower[i][k] = a[i][k] / d;
            }
            for i in k + 1..n {
                for j in k + 1..=i {
                    let upd = lower[i][k] * lower[j][k];
                    a[i][j] -= upd;
                    a[j][i] = a[i][j];
                }
            }
        }
        Ok(PivotedCholesky { lower, perm })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let l = &self.lower;
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                y[i] -= l[i][k] * y[k];
            }
            y[i] /= l[i][i];
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                y[i] -= l[k][i] * y[k];
            }
            y[i] /= l[i][i];
        }
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        x
    }
}

/// Eliminates every coordinate not in `keep` by minimizing over it. For all
/// `u`, `uᵀ S u = min_w [u; w]ᵀ M [u; w]`. Fails with `NotEliminable` when the
/// eliminated block is not positive definite, which means the minimum is
/// unbounded below or not attained.
pub fn schur_minimize(m: &SymMatrix, keep: &[usize]) -> Result<SchurReduction, SpectraError> {
    if !m.is_finite() {
        return Err(SpectraError::NonFinite);
    }
    let n = m.dim;
    let mut kept = vec![false; n];
    for &k in keep {
        if k >= n || kept[k] {
            return Err(SpectraError::BadIndex(k));
        }
        kept[k] = true;
    }
    let eliminated: Vec<usize> = (0..n).filter(|&i| !kept[i]).collect();

    let mut coupling = vec![vec![0.0; keep.len()]; eliminated.len()];
    let mut complement = SymMatrix::from_fn(keep.len(), |i, j| m.get(keep[i], keep[j]));
    if !eliminated.is_empty() {
        let block: Vec<Vec<f64>> = eliminated
            .iter()
            .map(|&i| eliminated.iter().map(|&j| m.get(i, j)).collect())
            .collect();
        let chol = PivotedCholesky::factor(&block)?;
        for (c, &k) in keep.iter().enumerate() {
            let rhs: Vec<f64> = eliminated.iter().map(|&e| m.get(e, k)).collect();
            for (r, x) in chol.solve(&rhs).into_iter().enumerate() {
                coupling[r][c] = x;
            }
        }
        for i in 0..keep.len() {
            for j in i..keep.len() {
                let corr_ij: f64 = eliminated
                    .iter()
                    .enumerate()
                    .map(|(r, &e)| m.get(keep[i], e) * coupling[r][j])
                    .sum();
                let corr_ji: f64 = eliminated
                    .iter()
                    .enumerate()
                    .map(|(r, &e)| m.get(keep[j], e) * coupling[r][i])
                    .sum();
                complement.set(i, j, m.get(keep[i], keep[j]) - 0.5 * (corr_ij + corr_ji));
            }
        }
    }
    Ok(SchurReduction {
        complement,
        keep: keep.to_vec(),
        eliminated,
        coupling,
        dim: n,
    })
}
