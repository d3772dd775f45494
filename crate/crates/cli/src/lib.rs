//! File formats, report and subcommand drivers around the `stadesign` core.

pub mod report;
pub mod scenario;
pub mod table;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use stadesign::verify::{
    assemble_operator, boundary_commutators, branch_populations, eigenbranch_outcome, eigenvalue_drift, invariant_residual_profile, lr_from_parts,
    population_drift, track_invariant,
};
use stadesign::{design, lie_invariant_directions, min_time_scan, Algebra, Error, ScenarioSpec};

pub use report::{BranchReport, RunReport};
pub use scenario::{load_algebra, parse_scenario};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("{0}: {1}")]
    Csv(PathBuf, csv::Error),
    #[error("{0}: {1}")]
    Schema(PathBuf, String),
    #[error("{0}")]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::Infeasible { .. } | Error::NoFeasibleTime { .. }) => 2,
            _ => 1,
        }
    }
}

fn io<T>(path: &Path, r: std::io::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn base_report(spec: &ScenarioSpec) -> RunReport {
    RunReport { scenario: spec.name.clone(), t_f: spec.t_f, c1: spec.c1(), c2: spec.c2, ..Default::default() }
}

/// Designs, verifies and writes `trajectory.csv`, `verify.csv` and `report.json` into `out`.
/// An infeasible design still writes the report.
pub fn run_design(spec: &ScenarioSpec, out: &Path) -> Result<RunReport, CliError> {
    let start = Instant::now();
    io(out, fs::create_dir_all(out))?;
    let mut report = base_report(spec);
    let sol = match design(spec) {
        Ok(sol) => sol,
        Err(Error::Infeasible { first_violation_time }) => {
            report.first_violation_time = first_violation_time;
            report.wall_time_s = start.elapsed().as_secs_f64();
            write_report(&out.join("report.json"), &report)?;
            return Ok(report);
        }
        Err(e) => return Err(e.into()),
    };
    report.feasible = true;
    report.c1 = sol.c1;
    report.c2 = sol.c2;
    report.hold_layers = sol.hold_layers.iter().map(|&(a, b)| [a, b]).collect();
    table::write_trajectory(&out.join("trajectory.csv"), &sol)?;

    let rep = &spec.algebra.rep;
    let (c0, c1) = boundary_commutators(rep, &sol)?;
    let scale = |i: usize| -> Result<f64, Error> {
        Ok(assemble_operator(rep, &sol.h_at(i))?.norm() * assemble_operator(rep, &sol.f_at(i))?.norm())
    };
    report.boundary_commutators = Some([c0, c1]);
    report.boundary_scales = Some([scale(0)?, scale(sol.len() - 1)?]);
    let local = invariant_residual_profile(rep, &sol.f_traj, &sol.h_traj, &sol.times)?;
    report.invariant_residual = Some(local[1..local.len() - 1].iter().copied().fold(0.0, f64::max));
    report.invariant_norm = Some(assemble_operator(rep, &sol.f_at(0))?.norm());

    let outcomes: Vec<_> = (0..rep.dim()).into_par_iter().map(|b| eigenbranch_outcome(rep, &sol, b)).collect();
    let mut followed = None;
    for (b, o) in outcomes.into_iter().enumerate() {
        let entry = match o {
            Ok(o) => {
                let e = BranchReport { branch: b + 1, final_branch: Some(o.final_index + 1), fidelity: Some(o.fidelity), note: None };
                followed.get_or_insert(o);
                e
            }
            Err(e @ Error::AmbiguousBranch { .. }) => BranchReport { branch: b + 1, final_branch: None, fidelity: None, note: Some(e.to_string()) },
            Err(e) => return Err(e.into()),
        };
        report.branches.push(entry);
    }

    match track_invariant(rep, &sol) {
        Ok(track) => {
            report.eigenvalue_drift = Some(eigenvalue_drift(&track));
            if let Some(o) = &followed {
                let pops = branch_populations(&track, &o.states);
                report.population_drift = Some(population_drift(&pops));
                report.lr_reconstruction = Some(lr_from_parts(rep, &sol, &track, &o.initial, &o.states)?.1);
                table::write_verify(&out.join("verify.csv"), &sol.times, &track, &pops, &local)?;
            }
        }
        Err(e) => report.verification_error = Some(e.to_string()),
    }
    report.wall_time_s = start.elapsed().as_secs_f64();
    write_report(&out.join("report.json"), &report)?;
    Ok(report)
}

pub fn write_report(path: &Path, report: &RunReport) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(report).map_err(|e| CliError::Schema(path.to_path_buf(), e.to_string()))?;
    io(path, fs::write(path, text + "\n"))
}

pub fn run_min_time(spec: &ScenarioSpec, lo: f64, hi: f64) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let mut report = base_report(spec);
    match min_time_scan(spec, lo, hi) {
        Ok(t) => {
            report.feasible = true;
            report.min_time = Some(t);
            if t == lo {
                report.note = Some(format!("whole bracket feasible; the minimum is at or below {lo}"));
            }
        }
        Err(Error::NoFeasibleTime { t_high }) => {
            report.note = Some(format!("no feasible final time up to {t_high}"));
        }
        Err(e) => return Err(e.into()),
    }
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(report)
}

pub fn algebra_report(algebra: &Algebra) -> String {
    let k = &algebra.constants;
    let mut out = format!(
        "algebra {}\nN = {}\nd = {}\nstructure constants ([T_b, T_c] = i Σ c T_a):\n{}jacobi residual = {:e}\n",
        algebra.name,
        k.n_generators(),
        algebra.rep.dim(),
        stadesign::algebra::describe(k),
        k.jacobi_residual()
    );
    let center = lie_invariant_directions(k);
    if center.is_empty() {
        out.push_str("center = {0}\n");
    } else {
        out.push_str("center basis:\n");
        for v in center {
            let terms: Vec<String> = v.iter().enumerate().filter(|(_, x)| x.abs() > 1e-12).map(|(a, x)| format!("{x:+} T{}", a + 1)).collect();
            out.push_str(&format!("  {}\n", terms.join(" ")));
        }
    }
    out
}

/// Scenario paths from a batch file: a JSON array, resolved against the file's directory.
pub fn read_batch(path: &Path) -> Result<Vec<PathBuf>, CliError> {
    let text = io(path, fs::read_to_string(path))?;
    let list: Vec<PathBuf> = serde_json::from_str(&text).map_err(|e| CliError::Schema(path.to_path_buf(), e.to_string()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    Ok(list.into_iter().map(|p| base.join(p)).collect())
}

/// Runs every scenario into `out/<name>/` on `jobs` threads. Results keep the input order.
pub fn run_batch(paths: &[PathBuf], out: &Path, jobs: usize) -> Result<Vec<(PathBuf, Result<RunReport, CliError>)>, CliError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(pool.install(|| {
        paths
            .par_iter()
            .map(|p| {
                let r = parse_scenario(p).and_then(|spec| run_design(&spec, &out.join(&spec.name)));
                (p.clone(), r)
            })
            .collect()
    }))
}
