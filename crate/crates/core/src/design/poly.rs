use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Polynomial in the local variable `s = (t - t0) / (t1 - t0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialAnsatz {
    coeffs: Vec<f64>,
    t0: f64,
    t1: f64,
}

fn falling(i: usize, k: usize) -> f64 {
    (0..k).map(|j| (i - j) as f64).product()
}

impl PolynomialAnsatz {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.t0, self.t1)
    }

    pub fn local_coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficients `b_i` of `Σ b_i (t - t0)^i`.
    pub fn power_coefficients(&self) -> Vec<f64> {
        let tau = self.t1 - self.t0;
        self.coeffs.iter().enumerate().map(|(i, a)| a / libm::pow(tau, i as f64)).collect()
    }

    /// Value and first three time derivatives.
    pub fn eval(&self, t: f64) -> [f64; 4] {
        let tau = self.t1 - self.t0;
        let s = (t - self.t0) / tau;
        let mut out = [0.0; 4];
        let mut scale = 1.0;
        for (k, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for i in (k..self.coeffs.len()).rev() {
                acc = acc * s + self.coeffs[i] * falling(i, k);
            }
            *slot = acc * scale;
            scale /= tau;
        }
        out
    }
}

/// Fits value and derivative data at both ends. `start[k]` / `end[k]` is the k-th time derivative.
/// The degree is raised to the number of conditions minus one if needed; coefficients
/// above that are zero.
pub fn fit_polynomial(start: &[f64], end: &[f64], t0: f64, t1: f64, degree: usize) -> Result<PolynomialAnsatz> {
    let tau = t1 - t0;
    let n = start.len() + end.len();
    if !(tau > 0.0) || !tau.is_finite() || n == 0 {
        return Err(Error::SingularFit);
    }
    let degree = degree.max(n - 1);
    let mut m = DMatrix::zeros(n, n);
    let mut rhs = DVector::zeros(n);
    for (k, v) in start.iter().enumerate() {
        m[(k, k)] = falling(k, k);
        rhs[k] = v * libm::pow(tau, k as f64);
    }
    for (k, v) in end.iter().enumerate() {
        let r = start.len() + k;
        for i in k..n {
            m[(r, i)] = falling(i, k);
        }
        rhs[r] = v * libm::pow(tau, k as f64);
    }
    let sol = m.lu().solve(&rhs).ok_or(Error::SingularFit)?;
    if sol.iter().any(|x| !x.is_finite()) {
        return Err(Error::SingularFit);
    }
    let mut coeffs = vec![0.0; degree + 1];
    coeffs[..n].copy_from_slice(sol.as_slice());
    Ok(PolynomialAnsatz { coeffs, t0, t1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothstep() {
        let p = fit_polynomial(&[1.0, 0.0, 0.0], &[0.0, 0.0, 0.0], 0.0, 1.0, 5).unwrap();
        let expect = [1.0, 0.0, 0.0, -10.0, 15.0, -6.0];
        for (a, b) in p.local_coefficients().iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn constant() {
        let p = fit_polynomial(&[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0], 0.0, 3.0, 5).unwrap();
        assert!(p.local_coefficients()[1..].iter().all(|c| c.abs() < 1e-14));
        assert_eq!(p.eval(1.7)[0], 1.0);
    }

    #[test]
    fn rescaled() {
        let p = fit_polynomial(&[1.0, 0.0, 0.0], &[0.0, 0.0, 0.0], 0.0, 200.0, 5).unwrap();
        let expect = [1.0, 0.0, 0.0, -10.0, 15.0, -6.0];
        for (i, (b, e)) in p.power_coefficients().iter().zip(expect).enumerate() {
            let want = e / libm::pow(200.0, i as f64);
            assert!((b - want).abs() <= 1e-12 * want.abs().max(1e-300), "{i}");
        }
    }

    #[test]
    fn extra_degree_zeroed() {
        let p = fit_polynomial(&[1.0, 0.0, 0.0], &[0.0, 0.0, 0.0], 0.0, 1.0, 8).unwrap();
        assert_eq!(p.degree(), 8);
        assert!(p.local_coefficients()[6..].iter().all(|c| *c == 0.0));
    }

    #[test]
    fn zero_interval() {
        assert_eq!(fit_polynomial(&[1.0], &[0.0], 0.0, 0.0, 5), Err(Error::SingularFit));
    }

    #[test]
    fn third_derivative_condition() {
        let start = [0.3, -0.2, 0.05, 0.7];
        let end = [1.0, 0.0, 0.0];
        let p = fit_polynomial(&start, &end, 2.0, 9.0, 5).unwrap();
        assert_eq!(p.degree(), 6);
        let a = p.eval(2.0);
        let b = p.eval(9.0);
        for k in 0..4 {
            assert!((a[k] - start[k]).abs() < 1e-12);
        }
        for k in 0..3 {
            assert!((b[k] - end[k]).abs() < 1e-12);
        }
    }
}
