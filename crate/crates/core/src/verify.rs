//! Independent checks of a designed shortcut in the matrix representation.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{Complex, DMatrix, DVector};

use crate::algebra::{commutator, CMatrix, GeneratorRep};
use crate::design::ShortcutSolution;
use crate::error::{Error, Result};
use crate::linalg::hermitian_jacobi;
use crate::QuantumState;

const STEP_TOL: f64 = 1e-8;
const MAX_SUBSTEPS: usize = 1 << 12;
const DEGENERACY_TOL: f64 = 1e-8;

fn cplx(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

fn cis(phase: f64) -> Complex<f64> {
    cplx(libm::cos(phase), libm::sin(phase))
}

pub fn assemble_operator(rep: &GeneratorRep, coeffs: &DVector<f64>) -> Result<CMatrix> {
    let n = rep.n_generators();
    if coeffs.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: coeffs.len() });
    }
    let d = rep.dim();
    let mut out = DMatrix::zeros(d, d);
    for (c, t) in coeffs.iter().zip(rep.matrices()) {
        out += t * cplx(*c, 0.0);
    }
    Ok(out)
}

/// Ascending eigenvalues with eigenvectors as matching columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let (raw, basis) = hermitian_jacobi(m);
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| raw[a].total_cmp(&raw[b]));
    let values = order.iter().map(|&i| raw[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| basis[(r, order[c])]);
    (values, vectors)
}

fn expm_apply(h: &CMatrix, dt: f64, psi: &QuantumState) -> QuantumState {
    let (values, vectors) = hermitian_eigen(h);
    let mut coeffs = vectors.adjoint() * psi;
    for (c, l) in coeffs.iter_mut().zip(&values) {
        *c *= cis(-l * dt);
    }
    vectors * coeffs
}

/// Piecewise cubic Hermite interpolation of the Hamiltonian samples.
struct HermiteTrack<'a> {
    times: &'a [f64],
    values: &'a DMatrix<f64>,
    slopes: DMatrix<f64>,
}

impl<'a> HermiteTrack<'a> {
    fn new(times: &'a [f64], values: &'a DMatrix<f64>) -> Self {
        let m = times.len();
        let slopes = DMatrix::from_fn(m, values.ncols(), |i, a| {
            let (lo, hi) = if m < 2 {
                (0, 0)
            } else if i == 0 {
                (0, 1)
            } else if i + 1 == m {
                (m - 2, m - 1)
            } else {
                (i - 1, i + 1)
            };
            if lo == hi {
                0.0
            } else {
                (values[(hi, a)] - values[(lo, a)]) / (times[hi] - times[lo])
            }
        });
        Self { times, values, slopes }
    }

    fn at(&self, i: usize, t: f64) -> DVector<f64> {
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let dt = t1 - t0;
        let s = (t - t0) / dt;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        DVector::from_fn(self.values.ncols(), |a, _| {
            h00 * self.values[(i, a)]
                + h10 * dt * self.slopes[(i, a)]
                + h01 * self.values[(i + 1, a)]
                + h11 * dt * self.slopes[(i + 1, a)]
        })
    }
}

fn propagate_fixed(rep: &GeneratorRep, track: &HermiteTrack, psi0: &QuantumState, substeps: usize) -> Result<Vec<QuantumState>> {
    let times = track.times;
    let mut out = Vec::with_capacity(times.len());
    let mut psi = psi0.clone();
    out.push(psi.clone());
    for i in 0..times.len().saturating_sub(1) {
        let dt = (times[i + 1] - times[i]) / substeps as f64;
        for k in 0..substeps {
            let mid = times[i] + dt * (k as f64 + 0.5);
            let h = assemble_operator(rep, &track.at(i, mid))?;
            psi = expm_apply(&h, dt, &psi);
        }
        out.push(psi.clone());
    }
    Ok(out)
}

/// Midpoint-exponential propagation, returning the state at every sample time. Sub-steps per
/// sample interval are doubled until the final state moves by less than 1e-8.
pub fn propagate(rep: &GeneratorRep, h_traj: &DMatrix<f64>, psi0: &QuantumState, times: &[f64]) -> Result<Vec<QuantumState>> {
    if psi0.len() != rep.dim() {
        return Err(Error::DimensionMismatch { expected: rep.dim(), found: psi0.len() });
    }
    if h_traj.nrows() != times.len() {
        return Err(Error::DimensionMismatch { expected: times.len(), found: h_traj.nrows() });
    }
    if h_traj.ncols() != rep.n_generators() {
        return Err(Error::DimensionMismatch { expected: rep.n_generators(), found: h_traj.ncols() });
    }
    for (i, row) in h_traj.row_iter().enumerate() {
        if row.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { time: times[i] });
        }
    }
    let track = HermiteTrack::new(times, h_traj);
    let mut substeps = 1;
    let mut prev = propagate_fixed(rep, &track, psi0, substeps)?;
    loop {
        substeps *= 2;
        let next = propagate_fixed(rep, &track, psi0, substeps)?;
        let change = (next.last().unwrap() - prev.last().unwrap()).norm();
        if change < STEP_TOL || substeps >= MAX_SUBSTEPS {
            return Ok(next);
        }
        prev = next;
    }
}

fn invariant_derivative(f_traj: &DMatrix<f64>, times: &[f64], i: usize) -> DVector<f64> {
    let m = times.len();
    let (lo, hi) = if i == 0 {
        (0, 1)
    } else if i + 1 == m {
        (m - 2, m - 1)
    } else {
        (i - 1, i + 1)
    };
    (f_traj.row(hi) - f_traj.row(lo)).transpose() / (times[hi] - times[lo])
}

/// Local `‖∂I/∂t + i[H, I]‖_F` with centred differences (one-sided at the ends).
pub fn invariant_residual_profile(
    rep: &GeneratorRep,
    f_traj: &DMatrix<f64>,
    h_traj: &DMatrix<f64>,
    times: &[f64],
) -> Result<Vec<f64>> {
    if times.len() < 2 || f_traj.nrows() != times.len() || h_traj.nrows() != times.len() {
        return Err(Error::DimensionMismatch { expected: times.len(), found: f_traj.nrows().min(h_traj.nrows()) });
    }
    (0..times.len())
        .map(|i| {
            let di = assemble_operator(rep, &invariant_derivative(f_traj, times, i))?;
            let h = assemble_operator(rep, &h_traj.row(i).transpose())?;
            let inv = assemble_operator(rep, &f_traj.row(i).transpose())?;
            Ok((di + commutator(&h, &inv) * cplx(0.0, 1.0)).norm())
        })
        .collect()
}

/// Maximum of [`invariant_residual_profile`] over interior samples.
pub fn invariant_residual(rep: &GeneratorRep, f_traj: &DMatrix<f64>, h_traj: &DMatrix<f64>, times: &[f64]) -> Result<f64> {
    let local = invariant_residual_profile(rep, f_traj, h_traj, times)?;
    Ok(local[1..local.len() - 1].iter().copied().fold(0.0, f64::max))
}

/// `(‖[H(0), I(0)]‖_F, ‖[H(t_f), I(t_f)]‖_F)`.
pub fn boundary_commutators(rep: &GeneratorRep, sol: &ShortcutSolution) -> Result<(f64, f64)> {
    let norm_at = |i: usize| -> Result<f64> {
        let h = assemble_operator(rep, &sol.h_at(i))?;
        let inv = assemble_operator(rep, &sol.f_at(i))?;
        Ok(commutator(&h, &inv).norm())
    };
    Ok((norm_at(0)?, norm_at(sol.len() - 1)?))
}

/// Invariant eigenbasis at one sample, ascending, in the transported gauge.
#[derive(Debug, Clone)]
pub struct InvariantSpectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

fn fix_phase_largest(v: &mut CMatrix, col: usize) {
    let (mut best, mut arg) = (0.0, cplx(1.0, 0.0));
    for r in 0..v.nrows() {
        let z = v[(r, col)];
        if z.norm_sqr() > best {
            best = z.norm_sqr();
            arg = z;
        }
    }
    let unit = arg.conj() / libm::sqrt(best);
    for r in 0..v.nrows() {
        v[(r, col)] *= unit;
    }
}

fn min_gap(values: &[f64]) -> f64 {
    values.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

/// Eigenbasis of the invariant along the trajectory with each eigenvector matched to its
/// predecessor by maximal overlap and phased so that successive overlaps are real positive.
pub fn track_invariant(rep: &GeneratorRep, sol: &ShortcutSolution) -> Result<Vec<InvariantSpectrum>> {
    let mut out: Vec<InvariantSpectrum> = Vec::with_capacity(sol.len());
    for i in 0..sol.len() {
        let inv = assemble_operator(rep, &sol.f_at(i))?;
        let (values, mut vectors) = hermitian_eigen(&inv);
        let scale = inv.norm().max(f64::MIN_POSITIVE);
        if values.len() > 1 && min_gap(&values) <= DEGENERACY_TOL * scale {
            return Err(Error::DegenerateInvariant { time: sol.times[i] });
        }
        match out.last() {
            None => (0..vectors.ncols()).for_each(|c| fix_phase_largest(&mut vectors, c)),
            Some(prev) => {
                let d = vectors.ncols();
                let overlaps = prev.eigenvectors.adjoint() * &vectors;
                let mut matched = DMatrix::zeros(d, d);
                let mut used = vec![false; d];
                let mut ordered = vec![0.0; d];
                for n in 0..d {
                    let j = (0..d)
                        .max_by(|&a, &b| overlaps[(n, a)].norm_sqr().total_cmp(&overlaps[(n, b)].norm_sqr()))
                        .unwrap();
                    if used[j] {
                        return Err(Error::DegenerateInvariant { time: sol.times[i] });
                    }
                    used[j] = true;
                    let ov = overlaps[(n, j)];
                    let unit = ov.conj() / libm::sqrt(ov.norm_sqr());
                    matched.set_column(n, &(vectors.column(j) * unit));
                    ordered[n] = values[j];
                }
                vectors = matched;
                out.push(InvariantSpectrum { eigenvalues: ordered, eigenvectors: vectors });
                continue;
            }
        }
        out.push(InvariantSpectrum { eigenvalues: values, eigenvectors: vectors });
    }
    Ok(out)
}

/// `max_{n,t} |λ_n(t) − λ_n(0)|`.
pub fn eigenvalue_drift(track: &[InvariantSpectrum]) -> f64 {
    let first = &track[0].eigenvalues;
    track
        .iter()
        .flat_map(|s| s.eigenvalues.iter().zip(first).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max)
}

/// `|⟨φ_n(t)|Ψ(t)⟩|²`, one row per sample.
pub fn branch_populations(track: &[InvariantSpectrum], states: &[QuantumState]) -> DMatrix<f64> {
    let d = track[0].eigenvalues.len();
    DMatrix::from_fn(track.len(), d, |i, n| track[i].eigenvectors.column(n).dotc(&states[i]).norm_sqr())
}

pub fn population_drift(pops: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..pops.nrows() {
        for n in 0..pops.ncols() {
            worst = worst.max((pops[(i, n)] - pops[(0, n)]).abs());
        }
    }
    worst
}

fn degenerate_with(values: &[f64], k: usize) -> Vec<usize> {
    let spread = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    (0..values.len()).filter(|&j| (values[j] - values[k]).abs() <= DEGENERACY_TOL * spread).collect()
}

/// Eigenbranch of `H(0)` with index `branch` (ascending) propagated to `t_f`.
#[derive(Debug, Clone)]
pub struct BranchOutcome {
    pub fidelity: f64,
    pub final_index: usize,
    pub initial: QuantumState,
    pub target: QuantumState,
    pub states: Vec<QuantumState>,
}

pub fn eigenbranch_outcome(rep: &GeneratorRep, sol: &ShortcutSolution, branch: usize) -> Result<BranchOutcome> {
    let d = rep.dim();
    if branch >= d {
        return Err(Error::DimensionMismatch { expected: d, found: branch + 1 });
    }
    let (v0, e0) = hermitian_eigen(&assemble_operator(rep, &sol.h_at(0))?);
    let (vf, ef) = hermitian_eigen(&assemble_operator(rep, &sol.h_at(sol.len() - 1))?);
    let deg = degenerate_with(&v0, branch);
    if deg.len() > 1 {
        return Err(Error::AmbiguousBranch { indices: deg });
    }
    let psi0: QuantumState = e0.column(branch).into_owned();

    // the invariant carries the branch across the trajectory; fall back to ordering if it is degenerate
    let final_index = match track_invariant(rep, sol) {
        Ok(track) => {
            let pick = |vecs: &CMatrix, psi: &QuantumState| {
                (0..d).max_by(|&a, &b| {
                    vecs.column(a).dotc(psi).norm_sqr().total_cmp(&vecs.column(b).dotc(psi).norm_sqr())
                })
            };
            let n = pick(&track[0].eigenvectors, &psi0).unwrap();
            let carried: QuantumState = track.last().unwrap().eigenvectors.column(n).into_owned();
            pick(&ef, &carried).unwrap()
        }
        Err(Error::DegenerateInvariant { .. }) => branch,
        Err(e) => return Err(e),
    };
    let deg = degenerate_with(&vf, final_index);
    if deg.len() > 1 {
        return Err(Error::AmbiguousBranch { indices: deg });
    }
    let states = propagate(rep, &sol.h_traj, &psi0, &sol.times)?;
    let target: QuantumState = ef.column(final_index).into_owned();
    let fidelity = target.dotc(states.last().unwrap()).norm_sqr();
    Ok(BranchOutcome { fidelity, final_index, initial: psi0, target, states })
}

pub fn eigenbranch_fidelity(rep: &GeneratorRep, sol: &ShortcutSolution, branch: usize) -> Result<f64> {
    eigenbranch_outcome(rep, sol, branch).map(|o| o.fidelity)
}

#[derive(Debug, Clone)]
pub struct LrPhases {
    /// `α_n(t)`, one row per sample.
    pub phases: DMatrix<f64>,
    pub mode_amplitudes: Vec<Complex<f64>>,
    pub eigenvalues: Vec<f64>,
}

/// Mode expansion `Σ c_n e^{iα_n(t)} |φ_n(t)⟩` against direct propagation of `psi0`.
pub fn lr_phases_and_reconstruction(rep: &GeneratorRep, sol: &ShortcutSolution, psi0: &QuantumState) -> Result<(LrPhases, f64)> {
    let track = track_invariant(rep, sol)?;
    let states = propagate(rep, &sol.h_traj, psi0, &sol.times)?;
    lr_from_parts(rep, sol, &track, psi0, &states)
}

pub fn lr_from_parts(
    rep: &GeneratorRep,
    sol: &ShortcutSolution,
    track: &[InvariantSpectrum],
    psi0: &QuantumState,
    states: &[QuantumState],
) -> Result<(LrPhases, f64)> {
    let m = sol.len();
    let d = rep.dim();
    let times = &sol.times;
    let mut integrand = DMatrix::zeros(m, d);
    for i in 0..m {
        let (lo, hi) = if i == 0 {
            (0, 1)
        } else if i + 1 == m {
            (m - 2, m - 1)
        } else {
            (i - 1, i + 1)
        };
        let h = assemble_operator(rep, &sol.h_at(i))?;
        for n in 0..d {
            let phi = track[i].eigenvectors.column(n);
            let dphi = (track[hi].eigenvectors.column(n) - track[lo].eigenvectors.column(n)) / cplx(times[hi] - times[lo], 0.0);
            let geometric = phi.dotc(&dphi) * cplx(0.0, 1.0);
            let energy = phi.dotc(&(&h * phi));
            integrand[(i, n)] = geometric.re - energy.re;
        }
    }
    let mut phases = DMatrix::zeros(m, d);
    for i in 1..m {
        let dt = times[i] - times[i - 1];
        for n in 0..d {
            phases[(i, n)] = phases[(i - 1, n)] + 0.5 * dt * (integrand[(i, n)] + integrand[(i - 1, n)]);
        }
    }
    let amplitudes: Vec<Complex<f64>> = (0..d).map(|n| track[0].eigenvectors.column(n).dotc(psi0)).collect();
    let mut worst = 0.0f64;
    for i in 0..m {
        let mut rebuilt: QuantumState = DVector::zeros(d);
        for n in 0..d {
            rebuilt += track[i].eigenvectors.column(n) * (amplitudes[n] * cis(phases[(i, n)]));
        }
        worst = worst.max((rebuilt - &states[i]).norm());
    }
    let lr = LrPhases { phases, mode_amplitudes: amplitudes, eigenvalues: track[0].eigenvalues.clone() };
    Ok((lr, worst))
}
