//! Scenario description, boundary data and the two closed-form design pipelines.

mod poly;
mod reduced;
mod scan;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::algebra::{builtin_algebra, Algebra};
use crate::error::{Error, Result};

pub use poly::{fit_polynomial, PolynomialAnsatz};
pub use scan::{literal_first_violation, literal_min_time_scan, min_time_scan};

/// Time profile of an imposed Hamiltonian component.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// `from` at t = 0, `to` at t = t_f.
    Linear { from: f64, to: f64 },
    /// `Σ coeffs[i] t^i`.
    Poly { coeffs: Vec<f64> },
}

impl Profile {
    /// Value, first and second derivative.
    pub fn eval(&self, t: f64, t_f: f64) -> [f64; 3] {
        match self {
            Profile::Linear { from, to } => {
                let slope = (to - from) / t_f;
                [from + slope * t, slope, 0.0]
            }
            Profile::Poly { coeffs } => {
                let mut v = [0.0; 3];
                for c in coeffs.iter().rev() {
                    v[2] = v[2] * t + 2.0 * v[1];
                    v[1] = v[1] * t + v[0];
                    v[0] = v[0] * t + c;
                }
                v
            }
        }
    }

}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub name: String,
    pub algebra: Algebra,
    pub t_f: f64,
    pub h_initial: DVector<f64>,
    pub h_final: DVector<f64>,
    /// 0-based indices of components held at zero.
    pub forbidden: Vec<usize>,
    /// 0-based index and profile of the imposed component.
    pub imposed: Vec<(usize, Profile)>,
    pub ansatz_component: Option<usize>,
    pub ansatz_degree: usize,
    pub grid_points: usize,
    /// `None` means `‖h_initial‖²`.
    pub c1: Option<f64>,
    pub c2: f64,
}

impl ScenarioSpec {
    pub fn new(name: &str, algebra: Algebra, t_f: f64, h_initial: DVector<f64>, h_final: DVector<f64>) -> Self {
        Self {
            name: name.into(),
            algebra,
            t_f,
            h_initial,
            h_final,
            forbidden: Vec::new(),
            imposed: Vec::new(),
            ansatz_component: None,
            ansatz_degree: 5,
            grid_points: 2001,
            c1: None,
            c2: 0.0,
        }
    }

    pub fn c1(&self) -> f64 {
        self.c1.unwrap_or_else(|| self.h_initial.norm_squared())
    }

    pub fn with_t_f(&self, t_f: f64) -> Self {
        let mut s = self.clone();
        s.t_f = t_f;
        s
    }

    pub fn times(&self) -> Vec<f64> {
        let m = self.grid_points;
        (0..m)
            .map(|i| if i + 1 == m { self.t_f } else { self.t_f * i as f64 / (m - 1) as f64 })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.algebra.n_generators();
        let bad = |why: String| Err(Error::InvalidScenario(why));
        if !(self.t_f > 0.0 && self.t_f.is_finite()) {
            return bad(format!("t_f must be positive, got {}", self.t_f));
        }
        if self.grid_points < 3 {
            return bad(format!("grid_points must be at least 3, got {}", self.grid_points));
        }
        if self.ansatz_degree < 5 {
            return bad(format!("ansatz_degree must be at least 5, got {}", self.ansatz_degree));
        }
        for h in [&self.h_initial, &self.h_final] {
            if h.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: h.len() });
            }
            if h.iter().any(|x| !x.is_finite()) {
                return bad("boundary Hamiltonian has non-finite entries".into());
            }
        }
        let in_range = |k: usize| k < n;
        if !self.forbidden.iter().all(|&k| in_range(k)) || !self.imposed.iter().all(|(k, _)| in_range(*k)) {
            return bad(format!("component index out of range 1..={n}"));
        }
        if let Some(k) = self.forbidden.iter().find(|k| self.imposed.iter().any(|(j, _)| j == *k)) {
            return bad(format!("component {} is both forbidden and imposed", k + 1));
        }
        if let Some(c1) = self.c1 {
            if !(c1 > 0.0 && c1.is_finite()) {
                return bad(format!("c1 must be positive, got {c1}"));
            }
        } else if self.c1() == 0.0 {
            return bad("c1 = auto needs a nonzero initial Hamiltonian".into());
        }
        for &k in &self.forbidden {
            if self.h_initial[k] != 0.0 || self.h_final[k] != 0.0 {
                return bad(format!("forbidden component {} is nonzero at a boundary", k + 1));
            }
        }
        for (k, p) in &self.imposed {
            let start = p.eval(0.0, self.t_f)[0];
            let end = p.eval(self.t_f, self.t_f)[0];
            let tol = |x: f64| 1e-9 * (1.0 + x.abs());
            if (start - self.h_initial[*k]).abs() > tol(start) || (end - self.h_final[*k]).abs() > tol(end) {
                return bad(format!(
                    "imposed profile of component {} ({start} → {end}) disagrees with the boundary Hamiltonians",
                    k + 1
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Family {
    Su2,
    U3s3,
}

pub(crate) fn family(algebra: &Algebra) -> Option<Family> {
    let matches = |name| builtin_algebra(name).map(|(k, _)| k.max_abs_diff(&algebra.constants) < 1e-12).unwrap_or(false);
    if matches("su2") {
        Some(Family::Su2)
    } else if matches("u3s3") {
        Some(Family::U3s3)
    } else {
        None
    }
}

/// The two-axis reduction shared by both pipelines: Hamiltonian on (x, z), invariant in (x, y, z).
#[derive(Debug, Clone)]
pub(crate) struct Plan {
    pub family: Family,
    /// Hamiltonian index playing the z role: T3 for su2, T4 for u3s3.
    pub z_index: usize,
    pub imposed_is_x: bool,
    pub imposed: Profile,
    pub ansatz_component: usize,
}

impl Plan {
    pub fn imposed_index(&self) -> usize {
        if self.imposed_is_x {
            0
        } else {
            self.z_index
        }
    }

    pub fn derived_index(&self) -> usize {
        if self.imposed_is_x {
            self.z_index
        } else {
            0
        }
    }
}

pub(crate) fn plan(spec: &ScenarioSpec) -> Result<Plan> {
    spec.validate()?;
    let fam = family(&spec.algebra)
        .ok_or_else(|| Error::PipelineUnavailable(format!("algebra `{}` is neither su2 nor u3s3", spec.algebra.name)))?;
    let (z_index, forbidden): (usize, &[usize]) = match fam {
        Family::Su2 => (2, &[1]),
        Family::U3s3 => (3, &[1, 2]),
    };
    let mut got = spec.forbidden.clone();
    got.sort_unstable();
    got.dedup();
    if got != forbidden {
        return Err(Error::PipelineUnavailable(format!(
            "expected forbidden components {:?}, got {:?}",
            forbidden.iter().map(|k| k + 1).collect::<Vec<_>>(),
            got.iter().map(|k| k + 1).collect::<Vec<_>>()
        )));
    }
    let [(idx, profile)] = spec.imposed.as_slice() else {
        return Err(Error::PipelineUnavailable("exactly one imposed component is required".into()));
    };
    let imposed_is_x = if *idx == 0 {
        true
    } else if *idx == z_index {
        false
    } else {
        return Err(Error::PipelineUnavailable(format!("component {} cannot be the imposed one", idx + 1)));
    };
    // imposed x ⇒ interpolate the invariant's z-like component, and vice versa
    let ansatz_component = if imposed_is_x { 2 } else { 0 };
    if let Some(a) = spec.ansatz_component {
        if a != ansatz_component {
            return Err(Error::PipelineUnavailable(format!(
                "ansatz component must be {} for this pattern, got {}",
                ansatz_component + 1,
                a + 1
            )));
        }
    }
    Ok(Plan { family: fam, z_index, imposed_is_x, imposed: profile.clone(), ansatz_component })
}

/// Invariant data at one boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryValues {
    pub time: f64,
    pub f: DVector<f64>,
    pub ansatz_component: usize,
    /// Value, first and second derivative of the interpolated component.
    pub ansatz: [f64; 3],
}

/// Frictionless boundary data `f(t_b) ∥ h(t_b)` at `t = 0` and `t = t_f`.
pub fn boundary_invariant_values(spec: &ScenarioSpec) -> Result<[BoundaryValues; 2]> {
    let plan = plan(spec)?;
    let frame = reduced::Frame::new(spec, &plan)?;
    let make = |end: usize| {
        let fp = frame.boundary_f(end);
        let f = frame.to_original(&plan, spec, fp);
        let u = f[plan.ansatz_component];
        BoundaryValues {
            time: if end == 0 { 0.0 } else { spec.t_f },
            f,
            ansatz_component: plan.ansatz_component,
            ansatz: [u, 0.0, 0.0],
        }
    };
    Ok([make(0), make(1)])
}

#[derive(Debug, Clone)]
pub struct ShortcutSolution {
    pub times: Vec<f64>,
    /// Rows are time samples.
    pub f_traj: DMatrix<f64>,
    pub h_traj: DMatrix<f64>,
    /// Time derivative of the invariant coefficients from the analytic ansatz chain.
    pub f_dot_traj: DMatrix<f64>,
    pub feasible: bool,
    pub first_violation_time: Option<f64>,
    pub c1: f64,
    pub c2: f64,
    pub ansatz_component: usize,
    pub ansatz: PolynomialAnsatz,
    /// Intervals on which the derived component is held at its boundary value.
    pub hold_layers: Vec<(f64, f64)>,
}

impl ShortcutSolution {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_f(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    pub fn f_at(&self, i: usize) -> DVector<f64> {
        self.f_traj.row(i).transpose()
    }

    pub fn h_at(&self, i: usize) -> DVector<f64> {
        self.h_traj.row(i).transpose()
    }

    pub fn f_dot_at(&self, i: usize) -> DVector<f64> {
        self.f_dot_traj.row(i).transpose()
    }

    /// `max_t |f1² + f2² + (f3 + f4)² − c1|` for u3s3, `|f|² − c1` for su2.
    pub fn gamma_drift(&self) -> f64 {
        let n = self.f_traj.ncols();
        (0..self.len())
            .map(|i| {
                let f = self.f_at(i);
                let g3 = if n == 4 { f[2] + f[3] } else { f[2] };
                (f[0] * f[0] + f[1] * f[1] + g3 * g3 - self.c1).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Runs whichever pipeline the scenario's algebra and constraint pattern select.
pub fn design(spec: &ScenarioSpec) -> Result<ShortcutSolution> {
    let plan = plan(spec)?;
    reduced::solve(spec, &plan)
}

pub fn design_su2(spec: &ScenarioSpec) -> Result<ShortcutSolution> {
    let plan = plan(spec)?;
    if plan.family != Family::Su2 {
        return Err(Error::PipelineUnavailable("design_su2 needs the su2 algebra".into()));
    }
    reduced::solve(spec, &plan)
}

pub fn design_u3s3(spec: &ScenarioSpec) -> Result<ShortcutSolution> {
    let plan = plan(spec)?;
    if plan.family != Family::U3s3 {
        return Err(Error::PipelineUnavailable("design_u3s3 needs the u3s3 algebra".into()));
    }
    reduced::solve(spec, &plan)
}
