use alloc::vec::Vec;

use nalgebra::{Complex, DMatrix, DVector};

/// Sign convention for basis vectors: the last significant component is positive.
pub(crate) fn canonical_sign(v: &mut DVector<f64>) {
    let max = v.amax();
    if max == 0.0 {
        return;
    }
    if let Some(x) = v.iter().rev().find(|x| x.abs() > 1e-9 * max) {
        if *x < 0.0 {
            v.neg_mut();
        }
    }
}

/// Singular value decomposition `a = u · diag(s) · vᵀ` by one-sided Jacobi rotations.
/// Wide inputs are padded with zero rows. Singular values are descending; columns of `u` that
/// belong to zero singular values are zero.
pub(crate) struct Svd {
    pub u: DMatrix<f64>,
    pub s: Vec<f64>,
    pub v: DMatrix<f64>,
}

impl Svd {
    pub fn new(a: &DMatrix<f64>) -> Self {
        let (m, n) = a.shape();
        let mut w = DMatrix::zeros(m.max(n), n);
        w.rows_mut(0, m).copy_from(a);
        let mut v = DMatrix::<f64>::identity(n, n);
        for _ in 0..80 {
            let mut rotated = false;
            for p in 0..n {
                for q in p + 1..n {
                    let alpha = w.column(p).norm_squared();
                    let beta = w.column(q).norm_squared();
                    let gamma = w.column(p).dot(&w.column(q));
                    if gamma == 0.0 || gamma.abs() <= f64::EPSILON * libm::sqrt(alpha * beta) {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (2.0 * gamma);
                    let t = if zeta == 0.0 { 1.0 } else { zeta.signum() / (zeta.abs() + libm::hypot(1.0, zeta)) };
                    let c = 1.0 / libm::hypot(1.0, t);
                    let s = c * t;
                    for mat in [&mut w, &mut v] {
                        for k in 0..mat.nrows() {
                            let (x, y) = (mat[(k, p)], mat[(k, q)]);
                            mat[(k, p)] = c * x - s * y;
                            mat[(k, q)] = s * x + c * y;
                        }
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
        let s: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
        let u = DMatrix::from_fn(m, n, |r, c| if s[c] > 0.0 { w[(r, order[c])] / s[c] } else { 0.0 });
        let v = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
        Self { u, s, v }
    }

    pub fn max(&self) -> f64 {
        self.s.first().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.s.last().copied().unwrap_or(0.0)
    }

    /// Right singular vectors with `σ ≤ rel_tol·σ_max`.
    pub fn null_vectors(&self, rel_tol: f64) -> Vec<DVector<f64>> {
        let cut = rel_tol * self.max();
        (0..self.s.len()).filter(|&i| self.s[i] <= cut).map(|i| self.v.column(i).into_owned()).collect()
    }

    /// Minimum-norm least-squares solution, dropping `σ ≤ rel_tol·σ_max`.
    pub fn solve(&self, rhs: &DVector<f64>, rel_tol: f64) -> DVector<f64> {
        let cut = rel_tol * self.max();
        let mut x = DVector::zeros(self.v.nrows());
        for i in (0..self.s.len()).filter(|&i| self.s[i] > cut) {
            let coeff = self.u.column(i).dot(rhs) / self.s[i];
            x.axpy(coeff, &self.v.column(i), 1.0);
        }
        x
    }
}

/// Orthonormal basis of the right null space, singular values below `rel_tol·σ_max` treated as zero.
pub(crate) fn null_space(m: &DMatrix<f64>, rel_tol: f64) -> Vec<DVector<f64>> {
    let n = m.ncols();
    let svd = Svd::new(m);
    if svd.max() == 0.0 {
        return (0..n).map(|i| DVector::from_fn(n, |j, _| f64::from(i == j))).collect();
    }
    svd.null_vectors(rel_tol)
}

/// Cyclic Jacobi diagonalisation of a Hermitian matrix. Eigenvalues come back unsorted with
/// eigenvectors as matching columns.
pub(crate) fn hermitian_jacobi(m: &DMatrix<Complex<f64>>) -> (Vec<f64>, DMatrix<Complex<f64>>) {
    let d = m.nrows();
    let mut a = m.clone();
    let mut v = DMatrix::<Complex<f64>>::identity(d, d);
    let scale = f64::EPSILON * m.norm();
    let floor = scale * scale;
    for _ in 0..64 {
        let off: f64 = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).map(|(i, j)| a[(i, j)].norm_sqr()).sum();
        if off <= floor {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let g = libm::hypot(a[(p, q)].re, a[(p, q)].im);
                if g == 0.0 {
                    continue;
                }
                let phase = a[(p, q)] / g;
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * g);
                let t = if tau == 0.0 { 1.0 } else { tau.signum() / (tau.abs() + libm::hypot(1.0, tau)) };
                let c = 1.0 / libm::hypot(1.0, t);
                let s = t * c;
                // columns p, q of the unitary rotation
                let (jpp, jqp) = (Complex::new(c, 0.0), -phase.conj() * s);
                let (jpq, jqq) = (Complex::new(s, 0.0), phase.conj() * c);
                for k in 0..d {
                    let (x, y) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = x * jpp + y * jqp;
                    a[(k, q)] = x * jpq + y * jqq;
                    let (x, y) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = x * jpp + y * jqp;
                    v[(k, q)] = x * jpq + y * jqq;
                }
                for k in 0..d {
                    let (x, y) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = jpp.conj() * x + jqp.conj() * y;
                    a[(q, k)] = jpq.conj() * x + jqq.conj() * y;
                }
                a[(p, q)] = Complex::new(0.0, 0.0);
                a[(q, p)] = Complex::new(0.0, 0.0);
            }
        }
    }
    ((0..d).map(|i| a[(i, i)].re).collect(), v)
}
