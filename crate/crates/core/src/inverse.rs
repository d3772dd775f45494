//! The linear map `ḟ = 𝒜(f) h`, its null spaces and generalized inverse.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::algebra::StructureConstants;
use crate::error::{Error, Result};
use crate::linalg::{canonical_sign, Svd};

const NULL_TOL: f64 = 1e-10;
const CONSISTENCY_TOL: f64 = 1e-8;
const PIVOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct SpectralData {
    pub a_matrix: DMatrix<f64>,
    /// Orthonormal basis of `ker 𝒜`.
    pub null_basis: Vec<DVector<f64>>,
    /// Orthonormal basis of `ker 𝒜ᵀ`.
    pub left_null_basis: Vec<DVector<f64>>,
    pub q_projector: DMatrix<f64>,
    pub p_projector: DMatrix<f64>,
    pub pseudoinverse: DMatrix<f64>,
}

impl SpectralData {
    pub fn n(&self) -> usize {
        self.a_matrix.nrows()
    }

    pub fn null_dim(&self) -> usize {
        self.null_basis.len()
    }
}

/// `𝒜_ab = Σ_c c(a,b,c) f_c`.
pub fn build_a_matrix(k: &StructureConstants, f: &DVector<f64>) -> Result<DMatrix<f64>> {
    let n = k.n_generators();
    if f.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: f.len() });
    }
    Ok(DMatrix::from_fn(n, n, |a, b| (0..n).map(|c| k.get(a, b, c) * f[c]).sum()))
}

fn columns(vs: &[DVector<f64>], n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, vs.len(), |i, j| vs[j][i])
}

pub fn spectral_decompose(a: &DMatrix<f64>) -> SpectralData {
    let n = a.nrows();
    let svd = Svd::new(a);
    let smax = svd.max();
    if !(smax > 0.0) {
        let basis: Vec<_> = (0..n).map(|i| DVector::from_fn(n, |j, _| f64::from(i == j))).collect();
        return SpectralData {
            a_matrix: a.clone(),
            null_basis: basis.clone(),
            left_null_basis: basis,
            q_projector: DMatrix::identity(n, n),
            p_projector: DMatrix::zeros(n, n),
            pseudoinverse: DMatrix::zeros(n, n),
        };
    }
    let mut right = svd.null_vectors(NULL_TOL);
    let mut left = Svd::new(&a.transpose()).null_vectors(NULL_TOL);
    right.iter_mut().chain(left.iter_mut()).for_each(canonical_sign);

    let v0 = columns(&right, n);
    let u0 = columns(&left, n);
    let group = if right.is_empty() {
        Some(DMatrix::zeros(n, n))
    } else if left.len() == right.len() {
        let overlap = u0.transpose() * &v0;
        if Svd::new(&overlap).min() > 1e-8 {
            overlap.try_inverse().map(|inv| &v0 * inv * u0.transpose())
        } else {
            None
        }
    } else {
        None
    };
    let (q, b) = match group.and_then(|q| {
        (a + &q * smax).try_inverse().map(|inv| {
            let b = inv - &q / smax;
            (q, b)
        })
    }) {
        Some(pair) => pair,
        None => {
            let q = &v0 * v0.transpose();
            let b = DMatrix::from_fn(n, n, |_, _| 0.0);
            let b = (0..n).fold(b, |acc, j| {
                let col = svd.solve(&DVector::from_fn(n, |i, _| f64::from(i == j)), NULL_TOL);
                let mut acc = acc;
                acc.set_column(j, &col);
                acc
            });
            (q, b)
        }
    };
    let p = DMatrix::identity(n, n) - &q;
    SpectralData {
        a_matrix: a.clone(),
        null_basis: right,
        left_null_basis: left,
        q_projector: q,
        p_projector: p,
        pseudoinverse: b,
    }
}

pub fn consistency_residual(spec: &SpectralData, f_dot: &DVector<f64>) -> f64 {
    (&spec.q_projector * f_dot).norm()
}

fn check_consistent(spec: &SpectralData, f_dot: &DVector<f64>) -> Result<()> {
    if f_dot.len() != spec.n() {
        return Err(Error::DimensionMismatch { expected: spec.n(), found: f_dot.len() });
    }
    let residual = consistency_residual(spec, f_dot);
    if residual > CONSISTENCY_TOL * f_dot.norm() {
        return Err(Error::Inconsistent { residual });
    }
    Ok(())
}

/// `h = ℬḟ + Σ_j coeffs_j · null_basis_j`.
pub fn solve_hamiltonian(spec: &SpectralData, f_dot: &DVector<f64>, null_coeffs: &[f64]) -> Result<DVector<f64>> {
    check_consistent(spec, f_dot)?;
    if null_coeffs.len() != spec.null_dim() {
        return Err(Error::DimensionMismatch { expected: spec.null_dim(), found: null_coeffs.len() });
    }
    let mut h = &spec.pseudoinverse * f_dot;
    for (c, v) in null_coeffs.iter().zip(&spec.null_basis) {
        h.axpy(*c, v, 1.0);
    }
    Ok(h)
}

#[derive(Debug, Clone)]
pub struct ConstrainedSolution {
    pub h: DVector<f64>,
    pub null_coeffs: Vec<f64>,
    pub residual: f64,
}

/// Chooses the null-space content so that `h[k] = value` for every `(k, value)` in `fixed` (0-based).
pub fn solve_constrained(spec: &SpectralData, f_dot: &DVector<f64>, fixed: &[(usize, f64)]) -> Result<ConstrainedSolution> {
    check_consistent(spec, f_dot)?;
    let n = spec.n();
    if let Some(&(k, _)) = fixed.iter().find(|(k, _)| *k >= n) {
        return Err(Error::DimensionMismatch { expected: n, found: k + 1 });
    }
    let h0 = &spec.pseudoinverse * f_dot;
    let q = spec.null_dim();
    let nk = DMatrix::from_fn(fixed.len(), q, |r, j| spec.null_basis[j][fixed[r].0]);
    let r = DVector::from_fn(fixed.len(), |i, _| fixed[i].1 - h0[fixed[i].0]);
    let coeffs = if q == 0 || fixed.is_empty() {
        DVector::zeros(q)
    } else {
        Svd::new(&nk).solve(&r, 1e-12)
    };
    let residual = (&nk * &coeffs - &r).norm();
    let scale = h0.norm() + fixed.iter().map(|(_, v)| v.abs()).sum::<f64>();
    if residual > CONSISTENCY_TOL * scale {
        return Err(Error::InfeasibleConstraints { residual });
    }
    let mut h = h0;
    for (c, v) in coeffs.iter().zip(&spec.null_basis) {
        h.axpy(*c, v, 1.0);
    }
    for &(k, v) in fixed {
        h[k] = v;
    }
    Ok(ConstrainedSolution { h, null_coeffs: coeffs.iter().copied().collect(), residual })
}

/// Row reduction of `[𝒜 | ḟ]` with the fixed components moved to the right-hand side.
/// Unknowns left without a pivot are set to zero.
pub fn gauss_solve(
    k: &StructureConstants,
    f: &DVector<f64>,
    f_dot: &DVector<f64>,
    fixed: &[(usize, f64)],
) -> Result<DVector<f64>> {
    let a = build_a_matrix(k, f)?;
    let n = a.nrows();
    if f_dot.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: f_dot.len() });
    }
    if let Some(&(k, _)) = fixed.iter().find(|(k, _)| *k >= n) {
        return Err(Error::DimensionMismatch { expected: n, found: k + 1 });
    }
    let free: Vec<usize> = (0..n).filter(|j| !fixed.iter().any(|(k, _)| k == j)).collect();
    let mut rhs = f_dot.clone();
    for &(k, v) in fixed {
        rhs.axpy(-v, &a.column(k).into_owned(), 1.0);
    }
    let m = free.len();
    let mut aug = DMatrix::from_fn(n, m + 1, |r, c| if c < m { a[(r, free[c])] } else { rhs[r] });
    let scale = a.amax().max(f64::MIN_POSITIVE);

    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for col in 0..m {
        if row == n {
            break;
        }
        let (best, val) = (row..n)
            .map(|r| (r, aug[(r, col)].abs()))
            .fold((row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= PIVOT_TOL * scale {
            continue;
        }
        aug.swap_rows(row, best);
        for r in (row + 1)..n {
            let factor = aug[(r, col)] / aug[(row, col)];
            if factor != 0.0 {
                for c in col..=m {
                    aug[(r, c)] -= factor * aug[(row, c)];
                }
            }
        }
        pivots.push((row, col));
        row += 1;
    }

    let rhs_scale = f_dot.norm() + a.norm() * libm::sqrt(fixed.iter().map(|(_, v)| v * v).sum::<f64>());
    let residual = libm::sqrt((row..n).map(|r| aug[(r, m)] * aug[(r, m)]).sum::<f64>());
    if residual > CONSISTENCY_TOL * rhs_scale {
        return Err(Error::Inconsistent { residual });
    }

    let mut x = DVector::zeros(m);
    for &(r, col) in pivots.iter().rev() {
        let mut s = aug[(r, m)];
        for c in (col + 1)..m {
            s -= aug[(r, c)] * x[c];
        }
        x[col] = s / aug[(r, col)];
    }
    let mut h = DVector::zeros(n);
    for (i, &j) in free.iter().enumerate() {
        h[j] = x[i];
    }
    for &(k, v) in fixed {
        h[k] = v;
    }
    Ok(h)
}
