use serde::{Deserialize, Serialize};

pub const FIDELITY_TOL: f64 = 1e-6;
pub const COMMUTATOR_TOL: f64 = 1e-8;
pub const SPECTRUM_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchReport {
    /// 1-based, ascending eigenvalue order of H(0).
    pub branch: usize,
    pub final_branch: Option<usize>,
    pub fidelity: Option<f64>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: String,
    pub feasible: bool,
    pub t_f: f64,
    pub c1: f64,
    pub c2: f64,
    pub first_violation_time: Option<f64>,
    pub hold_layers: Vec<[f64; 2]>,
    /// `‖[H, I]‖_F` at t = 0 and t = t_f.
    pub boundary_commutators: Option<[f64; 2]>,
    /// `‖H‖_F ‖I‖_F` at the same times.
    pub boundary_scales: Option<[f64; 2]>,
    pub invariant_residual: Option<f64>,
    pub eigenvalue_drift: Option<f64>,
    /// `‖I(0)‖_F`.
    pub invariant_norm: Option<f64>,
    pub population_drift: Option<f64>,
    pub lr_reconstruction: Option<f64>,
    pub branches: Vec<BranchReport>,
    pub min_time: Option<f64>,
    pub note: Option<String>,
    pub verification_error: Option<String>,
    pub wall_time_s: f64,
}

impl RunReport {
    /// Every check that decides the exit code, read from the fields above.
    pub fn verified(&self) -> bool {
        if self.verification_error.is_some() {
            return false;
        }
        let boundary = match (self.boundary_commutators, self.boundary_scales) {
            (Some(c), Some(s)) => c.iter().zip(&s).all(|(c, s)| *c <= COMMUTATOR_TOL * s),
            _ => false,
        };
        let spectrum = match (self.eigenvalue_drift, self.invariant_norm) {
            (Some(d), Some(n)) => d < SPECTRUM_TOL * n,
            _ => false,
        };
        let fids: Vec<f64> = self.branches.iter().filter_map(|b| b.fidelity).collect();
        let fidelity = !fids.is_empty() && fids.iter().all(|f| *f >= 1.0 - FIDELITY_TOL);
        boundary && spectrum && fidelity
    }

    pub fn exit_code(&self) -> i32 {
        if !self.feasible {
            2
        } else if self.min_time.is_some() || self.verified() {
            0
        } else {
            3
        }
    }
}
