//! Structure constants, matrix representations and the two built-in algebras.
//!
//! Indices are 0-based here. `c(a, b, c)` is the coefficient in
//! `[T_b, T_c] = i Σ_a c(a, b, c) T_a`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{canonical_sign, null_space, Svd};

pub type CMatrix = DMatrix<Complex<f64>>;

const CLOSURE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    n: usize,
    data: Vec<f64>,
}

impl StructureConstants {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n * n] }
    }

    pub fn n_generators(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[(a * self.n + b) * self.n + c]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, value: f64) {
        let n = self.n;
        self.data[(a * n + b) * n + c] = value;
    }

    /// Sets `c(a,b,c) = value` and its antisymmetric partner.
    pub fn set_pair(&mut self, a: usize, b: usize, c: usize, value: f64) {
        self.set(a, b, c, value);
        self.set(a, c, b, -value);
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    worst = worst.max((self.get(a, b, c) + self.get(a, c, b)).abs());
                }
            }
        }
        worst
    }

    pub fn jacobi_residual(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let mut s = 0.0;
                        for e in 0..n {
                            s += self.get(e, b, c) * self.get(a, e, d)
                                + self.get(e, c, d) * self.get(a, e, b)
                                + self.get(e, d, b) * self.get(a, e, c);
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.n != other.n {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorRep {
    dim: usize,
    matrices: Vec<CMatrix>,
}

impl GeneratorRep {
    /// Validates shape, Hermiticity and linear independence.
    pub fn new(dim: usize, matrices: Vec<CMatrix>) -> Result<Self> {
        if dim == 0 || matrices.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        for m in &matrices {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: m.nrows() });
            }
        }
        for (i, m) in matrices.iter().enumerate() {
            let scale = m.norm().max(1.0);
            if (m - m.adjoint()).norm() > CLOSURE_TOL * scale {
                return Err(Error::NonHermitian { index: i });
            }
        }
        let rep = Self { dim, matrices };
        let basis = rep.real_basis();
        let sv = Svd::new(&basis);
        let (max, min) = (sv.max(), sv.min());
        if max == 0.0 || min <= CLOSURE_TOL * max {
            return Err(Error::LinearlyDependent);
        }
        Ok(rep)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_generators(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    /// Generators as columns of a real `2d² × N` matrix (real parts then imaginary parts).
    fn real_basis(&self) -> DMatrix<f64> {
        let d2 = self.dim * self.dim;
        DMatrix::from_fn(2 * d2, self.matrices.len(), |r, a| {
            let z = self.matrices[a][r % d2];
            if r < d2 {
                z.re
            } else {
                z.im
            }
        })
    }
}

pub(crate) fn commutator(x: &CMatrix, y: &CMatrix) -> CMatrix {
    x * y - y * x
}

/// The algebra together with its representation, as consumed by the designer and verifier.
#[derive(Debug, Clone, PartialEq)]
pub struct Algebra {
    pub name: String,
    pub constants: StructureConstants,
    pub rep: GeneratorRep,
}

impl Algebra {
    pub fn builtin(name: &str) -> Result<Self> {
        let (constants, rep) = builtin_algebra(name)?;
        Ok(Self { name: name.to_string(), constants, rep })
    }

    pub fn from_rep(name: &str, rep: GeneratorRep) -> Result<Self> {
        let constants = verify_closure(&rep)?;
        Ok(Self { name: name.to_string(), constants, rep })
    }

    pub fn n_generators(&self) -> usize {
        self.constants.n_generators()
    }
}

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

fn cmat(d: usize, entries: &[Complex<f64>]) -> CMatrix {
    DMatrix::from_row_slice(d, d, entries)
}

pub fn builtin_algebra(name: &str) -> Result<(StructureConstants, GeneratorRep)> {
    match name {
        "su2" => {
            let mut k = StructureConstants::zeros(3);
            k.set_pair(2, 0, 1, 1.0);
            k.set_pair(0, 1, 2, 1.0);
            k.set_pair(1, 2, 0, 1.0);
            let o = c(0.0, 0.0);
            let h = c(0.5, 0.0);
            let t1 = cmat(2, &[o, h, h, o]);
            let t2 = cmat(2, &[o, c(0.0, -0.5), c(0.0, 0.5), o]);
            let t3 = cmat(2, &[h, o, o, -h]);
            Ok((k, GeneratorRep::new(2, vec![t1, t2, t3])?))
        }
        "u3s3" => {
            let mut k = StructureConstants::zeros(4);
            k.set_pair(2, 0, 1, 1.0);
            k.set_pair(0, 1, 2, 1.0);
            k.set_pair(1, 2, 0, 1.0);
            // [T4, T1] = i T2 and [T2, T4] = i T1
            k.set_pair(1, 3, 0, 1.0);
            k.set_pair(0, 1, 3, 1.0);
            let o = c(0.0, 0.0);
            let s = 1.0 / (2.0 * core::f64::consts::SQRT_2);
            let t1 = cmat(3, &[o, c(s, 0.0), o, c(s, 0.0), o, c(s, 0.0), o, c(s, 0.0), o]);
            let t2 = cmat(
                3,
                &[o, c(0.0, -s), o, c(0.0, s), o, c(0.0, s), o, c(0.0, -s), o],
            );
            let q = c(0.25, 0.0);
            let t3 = cmat(3, &[q, o, q, o, c(-0.5, 0.0), o, q, o, q]);
            let one = c(1.0, 0.0);
            let t4 = cmat(3, &[one, o, o, o, o, o, o, o, one]);
            Ok((k, GeneratorRep::new(3, vec![t1, t2, t3, t4])?))
        }
        other => Err(Error::UnsupportedAlgebra(other.to_string())),
    }
}

/// Recovers structure constants from a representation by least squares in the generator span.
pub fn verify_closure(rep: &GeneratorRep) -> Result<StructureConstants> {
    let n = rep.n_generators();
    let d2 = rep.dim * rep.dim;
    let basis = rep.real_basis();
    let svd = Svd::new(&basis);
    let mut k = StructureConstants::zeros(n);
    for b in 0..n {
        for cc in (b + 1)..n {
            let tb = &rep.matrices[b];
            let tc = &rep.matrices[cc];
            // [T_b, T_c] = i Σ c_a T_a  ⇒  −i[T_b, T_c] = Σ c_a T_a
            let target = commutator(tb, tc) * c(0.0, -1.0);
            let rhs = DVector::from_fn(2 * d2, |r, _| {
                let z = target[r % d2];
                if r < d2 {
                    z.re
                } else {
                    z.im
                }
            });
            let coeffs = svd.solve(&rhs, 1e-14);
            let residual = (&basis * &coeffs - &rhs).norm();
            let scale = (tb.norm() * tc.norm()).max(f64::MIN_POSITIVE);
            if residual > CLOSURE_TOL * scale {
                return Err(Error::NotClosed { b, c: cc, residual });
            }
            for a in 0..n {
                let v = coeffs[a];
                let v = if v.abs() < 1e-14 * scale { 0.0 } else { v };
                k.set_pair(a, b, cc, v);
            }
        }
    }
    Ok(k)
}

/// Basis of the center: all `v` with `Σ_c c(a,b,c) v_c = 0` for every `a, b`.
pub fn lie_invariant_directions(k: &StructureConstants) -> Vec<DVector<f64>> {
    let n = k.n_generators();
    let stacked = DMatrix::from_fn(n * n, n, |row, cc| k.get(row / n, row % n, cc));
    null_space(&stacked, CLOSURE_TOL)
        .into_iter()
        .map(|mut v| {
            canonical_sign(&mut v);
            v
        })
        .collect()
}

pub fn describe(k: &StructureConstants) -> String {
    let n = k.n_generators();
    let mut out = String::new();
    for a in 0..n {
        for b in 0..n {
            for cc in (b + 1)..n {
                let v = k.get(a, b, cc);
                if v != 0.0 {
                    out.push_str(&format!(
                        "[T{}, T{}] ∋ {:+} i T{}\n",
                        b + 1,
                        cc + 1,
                        v,
                        a + 1
                    ));
                }
            }
        }
    }
    out
}
