//! Both pipelines reduce to `ḟ = h × f` with `h = (p, 0, q)` in a rotated frame where the
//! imposed component `p` sits on x and the derived component `q` on z. The interpolated
//! invariant component is `u = f_z`, then `f_y = u̇ / p`, `f_x = √(c1 − u² − f_y²)` and
//! `q = [(ü − (ṗ/p) u̇)/p + u p] / f_x`.
//!
//! An endpoint where `p` vanishes is singular: `f_x` must grow from zero and the formula for `q`
//! is 0/0 there. Such an endpoint gets a hold layer on which `q` keeps its boundary value and
//! `f` is integrated from the exact equation of motion. The bulk polynomial matches the layer
//! solution up to the third derivative so `q` joins with a continuous slope.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use super::{fit_polynomial, Family, Plan, PolynomialAnsatz, Profile, ScenarioSpec, ShortcutSolution};
use crate::error::{Error, Result};

type V3 = [f64; 3];

const LADDER_STEPS: usize = 250;
const LADDER_DENOM: f64 = 1000.0;
const MAX_ROTATION_STEP: f64 = 1e-3;

fn cross(a: V3, b: V3) -> V3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn axpy(a: f64, x: V3, y: V3) -> V3 {
    [y[0] + a * x[0], y[1] + a * x[1], y[2] + a * x[2]]
}

pub(crate) struct Frame {
    t_f: f64,
    c1: f64,
    c2: f64,
    sigma: f64,
    profile: Profile,
    p: [f64; 2],
    q: [f64; 2],
    singular: [bool; 2],
}

impl Frame {
    pub fn new(spec: &ScenarioSpec, plan: &Plan) -> Result<Self> {
        let (pi, qi) = (plan.imposed_index(), plan.derived_index());
        let p = [spec.h_initial[pi], spec.h_final[pi]];
        let q = [spec.h_initial[qi], spec.h_final[qi]];
        let bad = |why: &str| Err(Error::InvalidScenario(why.into()));
        let sigma = match (p[0] == 0.0, p[1] == 0.0) {
            (true, true) => return bad("the imposed component vanishes at both boundaries"),
            (false, false) if p[0].signum() != p[1].signum() => {
                return bad("the imposed component changes sign between the boundaries")
            }
            (false, _) => p[0].signum(),
            (true, false) => p[1].signum(),
        };
        let singular = [p[0] == 0.0, p[1] == 0.0];
        for end in 0..2 {
            if singular[end] && q[end] == 0.0 {
                return bad("a boundary Hamiltonian vanishes");
            }
        }
        Ok(Self { t_f: spec.t_f, c1: spec.c1(), c2: spec.c2, sigma, profile: plan.imposed.clone(), p, q, singular })
    }

    pub fn boundary_f(&self, end: usize) -> V3 {
        let (p, q) = (self.p[end], self.q[end]);
        let s = self.sigma * libm::sqrt(self.c1) / libm::hypot(p, q);
        [s * p, 0.0, s * q]
    }

    fn unprime(plan: &Plan, v: V3) -> V3 {
        if plan.imposed_is_x {
            v
        } else {
            [v[2], -v[1], v[0]]
        }
    }

    pub fn to_original(&self, plan: &Plan, spec: &ScenarioSpec, fp: V3) -> DVector<f64> {
        let f = Self::unprime(plan, fp);
        match plan.family {
            Family::Su2 => DVector::from_column_slice(&f),
            Family::U3s3 => DVector::from_column_slice(&[f[0], f[1], f[2] - spec.c2, spec.c2]),
        }
    }

    fn h(&self, t: f64, q: f64) -> [V3; 3] {
        let [p, pd, pdd] = self.profile.eval(t, self.t_f);
        [[p, 0.0, q], [pd, 0.0, 0.0], [pdd, 0.0, 0.0]]
    }

    /// RK4 for `ḟ = h × f` with `q` held, sampled at each target (monotone in time).
    fn integrate(&self, q: f64, f0: V3, t0: f64, targets: &[f64]) -> Vec<V3> {
        let rhs = |t: f64, f: V3| cross(self.h(t, q)[0], f);
        let speed = |t: f64| libm::hypot(self.profile.eval(t, self.t_f)[0], q);
        let (mut t, mut f) = (t0, f0);
        let mut out = Vec::with_capacity(targets.len());
        for &tt in targets {
            let span = tt - t;
            if span != 0.0 {
                let hmax = speed(t).max(speed(tt)).max(speed(0.5 * (t + tt)));
                let n = libm::ceil(span.abs() * hmax / MAX_ROTATION_STEP).max(1.0) as usize;
                let dt = span / n as f64;
                for i in 0..n {
                    let s = t + dt * i as f64;
                    let k1 = rhs(s, f);
                    let k2 = rhs(s + 0.5 * dt, axpy(0.5 * dt, k1, f));
                    let k3 = rhs(s + 0.5 * dt, axpy(0.5 * dt, k2, f));
                    let k4 = rhs(s + dt, axpy(dt, k3, f));
                    for j in 0..3 {
                        f[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
                    }
                }
            }
            t = tt;
            out.push(f);
        }
        out
    }

    /// z-component of f and its first three derivatives along the held-layer motion.
    fn layer_derivatives(&self, t: f64, q: f64, f: V3) -> [f64; 4] {
        let [h, hd, hdd] = self.h(t, q);
        let d1 = cross(h, f);
        let d2 = axpy(1.0, cross(hd, f), cross(h, d1));
        let d3 = [0, 1, 2].map(|j| cross(hdd, f)[j] + 2.0 * cross(hd, d1)[j] + cross(h, d2)[j]);
        [f[2], d1[2], d2[2], d3[2]]
    }
}

struct Trajectory {
    f: Vec<V3>,
    f_dot: Vec<V3>,
    q: Vec<f64>,
    /// `max |q̇|` over the bulk grid points.
    roughness: f64,
    /// `q` runs monotonically from its initial to its final boundary value.
    monotone: bool,
    ansatz: PolynomialAnsatz,
    layers: Vec<(f64, f64)>,
}

/// Layer motion from one singular end, sampled at every grid time and ladder point it may need.
struct LayerTrack {
    times: Vec<f64>,
    states: Vec<V3>,
}

impl LayerTrack {
    fn new(frame: &Frame, end: usize, grid: &[f64], ladder: &[f64]) -> Self {
        let t_f = frame.t_f;
        let reach = ladder.last().copied().unwrap_or(0.0);
        let mut times: Vec<f64> = if end == 0 {
            grid.iter().copied().filter(|&t| t <= reach).chain(ladder.iter().copied()).collect()
        } else {
            grid.iter().copied().filter(|&t| t >= t_f - reach).chain(ladder.iter().map(|l| t_f - l)).collect()
        };
        times.sort_by(f64::total_cmp);
        times.dedup();
        if end == 1 {
            times.reverse();
        }
        let t0 = if end == 0 { 0.0 } else { t_f };
        let states = frame.integrate(frame.q[end], frame.boundary_f(end), t0, &times);
        Self { times, states }
    }

    fn at(&self, t: f64) -> V3 {
        let i = self.times.iter().position(|&s| s == t).expect("layer sample");
        self.states[i]
    }
}

/// `Ok(Err(t))` reports the first grid time where the construction breaks down.
fn attempt(
    frame: &Frame,
    times: &[f64],
    tracks: &[Option<LayerTrack>; 2],
    layer: f64,
    degree: usize,
) -> Result<core::result::Result<Trajectory, f64>> {
    let m = times.len();
    let t_f = frame.t_f;
    let bounds = [if tracks[0].is_some() { layer } else { 0.0 }, if tracks[1].is_some() { t_f - layer } else { t_f }];
    let mut f = vec![[0.0; 3]; m];
    let mut f_dot = vec![[0.0; 3]; m];
    let mut q = vec![0.0; m];
    let mut layers = Vec::new();
    let slack = 1e-12 * libm::sqrt(frame.c1);

    let mut conditions: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for end in 0..2 {
        let edge = bounds[end];
        conditions[end] = match &tracks[end] {
            Some(track) => {
                let inside = |t: f64| if end == 0 { t < edge } else { t > edge };
                for i in (0..m).filter(|&i| inside(times[i])) {
                    let state = track.at(times[i]);
                    if state[0] < -slack {
                        return Ok(Err(times[i]));
                    }
                    f[i] = state;
                    q[i] = frame.q[end];
                    f_dot[i] = cross(frame.h(times[i], q[i])[0], state);
                }
                layers.push(if end == 0 { (0.0, edge) } else { (edge, t_f) });
                frame.layer_derivatives(edge, frame.q[end], track.at(edge)).to_vec()
            }
            None => vec![frame.boundary_f(end)[2], 0.0, 0.0],
        };
    }

    let (a, b) = (bounds[0], bounds[1]);
    let ansatz = fit_polynomial(&conditions[0], &conditions[1], a, b, degree)?;
    let mut roughness = 0.0f64;
    for i in (0..m).filter(|&i| times[i] >= a && times[i] <= b) {
        let t = times[i];
        let [u, ud, udd, uddd] = ansatz.eval(t);
        let [p, pd, pdd] = frame.profile.eval(t, t_f);
        if p == 0.0 || !p.is_finite() {
            return Ok(Err(t));
        }
        let y = ud / p;
        let arg = frame.c1 - u * u - y * y;
        if !(arg > 0.0) {
            return Ok(Err(t));
        }
        let w = libm::sqrt(arg);
        let yd = (udd * p - ud * pd) / (p * p);
        let wd = -(u * ud + y * yd) / w;
        let inner = (udd - pd / p * ud) / p;
        let num = inner + u * p;
        let inner_d = (uddd - (pdd / p - pd * pd / (p * p)) * ud - pd / p * udd) / p - inner * pd / p;
        let num_d = inner_d + ud * p + u * pd;
        f[i] = [w, y, u];
        f_dot[i] = [wd, yd, ud];
        q[i] = num / w;
        roughness = roughness.max(((num_d - q[i] * wd) / w).abs());
    }
    if tracks[0].is_none() {
        q[0] = frame.q[0];
    }
    if tracks[1].is_none() {
        q[m - 1] = frame.q[1];
    }
    let slack = 1e-12 * (frame.q[0].abs() + frame.q[1].abs());
    let dir = (frame.q[1] - frame.q[0]).signum();
    let monotone = q.windows(2).all(|w| dir * (w[1] - w[0]) >= -slack);
    Ok(Ok(Trajectory { f, f_dot, q, roughness, monotone, ansatz, layers }))
}

/// With singular endpoints every layer width on the ladder is tried. Among the feasible ones a
/// monotone derived component is preferred, then the smallest `max |q̇|`.
pub(crate) fn solve(spec: &ScenarioSpec, plan: &Plan) -> Result<ShortcutSolution> {
    let frame = Frame::new(spec, plan)?;
    let times = spec.times();
    if !frame.singular.iter().any(|&s| s) {
        return match attempt(&frame, &times, &[None, None], 0.0, spec.ansatz_degree)? {
            Ok(traj) => Ok(assemble(spec, plan, &frame, times, traj)),
            Err(t) => Err(Error::Infeasible { first_violation_time: Some(t) }),
        };
    }
    let ladder: Vec<f64> = (1..=LADDER_STEPS).map(|k| spec.t_f * k as f64 / LADDER_DENOM).collect();
    let tracks = [0, 1].map(|end| frame.singular[end].then(|| LayerTrack::new(&frame, end, &times, &ladder)));
    let mut first_violation = None;
    let mut best: Option<Trajectory> = None;
    for &layer in &ladder {
        match attempt(&frame, &times, &tracks, layer, spec.ansatz_degree)? {
            Ok(traj) => {
                if best.as_ref().is_none_or(|b| (!traj.monotone, traj.roughness) < (!b.monotone, b.roughness)) {
                    best = Some(traj);
                }
            }
            Err(t) => {
                first_violation.get_or_insert(t);
            }
        }
    }
    match best {
        Some(traj) => Ok(assemble(spec, plan, &frame, times, traj)),
        None => Err(Error::Infeasible { first_violation_time: first_violation }),
    }
}

fn assemble(spec: &ScenarioSpec, plan: &Plan, frame: &Frame, times: Vec<f64>, traj: Trajectory) -> ShortcutSolution {
    let n = spec.algebra.n_generators();
    let m = times.len();
    let mut f_traj = DMatrix::zeros(m, n);
    let mut h_traj = DMatrix::zeros(m, n);
    let mut f_dot_traj = DMatrix::zeros(m, n);
    for i in 0..m {
        let f = frame.to_original(plan, spec, traj.f[i]);
        f_traj.row_mut(i).copy_from(&f.transpose());
        let fd = Frame::unprime(plan, traj.f_dot[i]);
        f_dot_traj[(i, 0)] = fd[0];
        f_dot_traj[(i, 1)] = fd[1];
        f_dot_traj[(i, 2)] = fd[2];
        h_traj[(i, plan.imposed_index())] = frame.profile.eval(times[i], spec.t_f)[0];
        h_traj[(i, plan.derived_index())] = traj.q[i];
    }
    ShortcutSolution {
        times,
        f_traj,
        h_traj,
        f_dot_traj,
        feasible: true,
        first_violation_time: None,
        c1: frame.c1,
        c2: frame.c2,
        ansatz_component: plan.ansatz_component,
        ansatz: traj.ansatz,
        hold_layers: traj.layers,
    }
}

/// Plain polynomial through the frictionless data on `[0, t_f]`, checked for
/// `c1 − u² − (u̇/p)² ≥ 0` on interior grid points only.
pub(crate) fn literal_violation(spec: &ScenarioSpec, plan: &Plan) -> Result<Option<f64>> {
    let frame = Frame::new(spec, plan)?;
    let start = [frame.boundary_f(0)[2], 0.0, 0.0];
    let end = [frame.boundary_f(1)[2], 0.0, 0.0];
    let ansatz = fit_polynomial(&start, &end, 0.0, spec.t_f, spec.ansatz_degree)?;
    let times = spec.times();
    for &t in &times[1..times.len() - 1] {
        let [u, ud, _, _] = ansatz.eval(t);
        let p = frame.profile.eval(t, spec.t_f)[0];
        let y = ud / p;
        if !(frame.c1 - u * u - y * y >= 0.0) {
            return Ok(Some(t));
        }
    }
    Ok(None)
}
