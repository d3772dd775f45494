use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use stadesign::{design, Error, Profile};
use stadesign_cli::table::read_trajectory;
use stadesign_cli::{algebra_report, load_algebra, parse_scenario, read_batch, run_batch, run_design, BranchReport, CliError, RunReport};
use tempfile::TempDir;

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

const FIG1_BODY: &str = r#""algebra": "su2", "h_initial": [0, 0, 1], "h_final": [0.4, 0, 0], "forbidden": [2],
    "imposed": {"1": {"type": "linear", "from": 0, "to": 0.4}}"#;

fn schema_error(r: Result<stadesign::ScenarioSpec, CliError>) -> String {
    match r {
        Err(e @ CliError::Schema(..)) | Err(e @ CliError::Core(_)) => {
            assert_eq!(e.exit_code(), 1);
            e.to_string()
        }
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn bundled_scenarios_parse() {
    let s = parse_scenario(&bundled("fig1.json")).unwrap();
    assert_eq!((s.algebra.name.as_str(), s.t_f, s.forbidden.clone()), ("su2", 200.0, vec![1]));
    assert_eq!(s.imposed, vec![(0, Profile::Linear { from: 0.0, to: 0.4 })]);
    assert_eq!((s.grid_points, s.ansatz_degree, s.c1, s.c2), (2001, 5, None, 0.0));

    let s = parse_scenario(&bundled("fig3.json")).unwrap();
    assert_eq!((s.algebra.name.as_str(), s.t_f, s.forbidden.clone()), ("u3s3", 80.0, vec![1, 2]));
    assert_eq!(s.imposed, vec![(3, Profile::Linear { from: 1.0, to: 0.0 })]);

    let s = parse_scenario(&bundled("fig2.json")).unwrap();
    assert_eq!(s.imposed, vec![(2, Profile::Linear { from: 1.0, to: 0.0 })]);
}

#[test]
fn schema_violations() {
    let dir = TempDir::new().unwrap();
    let conflict = write(
        dir.path(),
        "conflict.json",
        r#"{"algebra": "su2", "t_f": 10, "h_initial": [0, 0, 1], "h_final": [0, 0, 1], "forbidden": [2],
            "imposed": {"2": {"type": "linear", "from": 0, "to": 0}}}"#,
    );
    assert!(schema_error(parse_scenario(&conflict)).contains("both forbidden and imposed"));

    let unknown = write(dir.path(), "unknown.json", &format!(r#"{{"t_f": 200, "colour": 1, {FIG1_BODY}}}"#));
    assert!(schema_error(parse_scenario(&unknown)).contains("colour"));

    let wrong = write(dir.path(), "wrong.json", &format!(r#"{{"t_f": "long", {FIG1_BODY}}}"#));
    schema_error(parse_scenario(&wrong));

    let zero = write(dir.path(), "zero.json", &format!(r#"{{"t_f": 200, {}}}"#, FIG1_BODY.replace("[2]", "[0]")));
    assert!(schema_error(parse_scenario(&zero)).contains("numbered from 1"));

    let c1 = write(dir.path(), "c1.json", &format!(r#"{{"t_f": 200, "c1": "big", {FIG1_BODY}}}"#));
    assert!(schema_error(parse_scenario(&c1)).contains("c1"));

    let ok = write(dir.path(), "ok.json", &format!(r#"{{"t_f": 200, "c1": 2.5, "grid_points": 101, {FIG1_BODY}}}"#));
    let s = parse_scenario(&ok).unwrap();
    assert_eq!((s.c1, s.grid_points, s.name.as_str()), (Some(2.5), 101, "ok"));

    let poly = write(
        dir.path(),
        "poly.json",
        &format!(r#"{{"t_f": 200, {}}}"#, FIG1_BODY.replace(r#"{"type": "linear", "from": 0, "to": 0.4}"#, r#"{"type": "poly", "coeffs": [0, 0.002]}"#)),
    );
    assert_eq!(parse_scenario(&poly).unwrap().imposed, vec![(0, Profile::Poly { coeffs: vec![0.0, 0.002] })]);
}

const SU2_REP: &str = r#"{"dim": 2, "generators": [
    [[0, 0.5], [0.5, 0]],
    [[0, [0, -0.5]], [[0, 0.5], 0]],
    [[0.5, 0], [0, -0.5]]]}"#;

#[test]
fn custom_representation() {
    let dir = TempDir::new().unwrap();
    let rep = write(dir.path(), "pauli.json", SU2_REP);
    let a = load_algebra(rep.to_str().unwrap()).unwrap();
    assert_eq!(a.name, "pauli");
    let text = algebra_report(&a);
    assert!(text.contains("N = 3") && text.contains("center = {0}"));

    // same physics through the rep-file path
    let scen = write(dir.path(), "s.json", &format!(r#"{{"t_f": 200, {}}}"#, FIG1_BODY.replace(r#""su2""#, r#"{"rep_file": "pauli.json"}"#)));
    let spec = parse_scenario(&scen).unwrap();
    let (a, b) = (design(&spec).unwrap(), design(&parse_scenario(&bundled("fig1.json")).unwrap()).unwrap());
    assert_eq!(a.h_traj, b.h_traj);

    let bad = write(dir.path(), "bad.json", &SU2_REP.replace("[[0, 0.5], 0]", "[[0, 0.4], 0]"));
    let err = load_algebra(bad.to_str().unwrap()).unwrap_err();
    assert!(matches!(err, CliError::Core(Error::NonHermitian { index: 1 })));
    assert!(err.to_string().contains("generator 2"));

    let u = algebra_report(&load_algebra("u3s3").unwrap());
    assert!(u.contains("-0.7071067811865475 T3 +0.7071067811865475 T4"));
}

#[test]
fn fig1_tables() {
    let dir = TempDir::new().unwrap();
    let spec = parse_scenario(&bundled("fig1.json")).unwrap();
    let report = run_design(&spec, dir.path()).unwrap();
    assert_eq!(report.exit_code(), 0);
    assert_eq!(report.branches.len(), 2);

    let t = read_trajectory(&dir.path().join("trajectory.csv")).unwrap();
    let sol = design(&spec).unwrap();
    // bit-for-bit
    assert_eq!(t.times, sol.times);
    assert_eq!(t.h, sol.h_traj);
    assert_eq!(t.f, sol.f_traj);
    let m = t.times.len() - 1;
    assert_eq!((t.h[(0, 2)], t.h[(m, 2)]), (1.0, 0.0));
    assert!((t.f[(0, 2)] - 1.0).abs() < 1e-12 && t.f[(m, 2)].abs() < 1e-12);

    let verify = fs::read_to_string(dir.path().join("verify.csv")).unwrap();
    let header = verify.lines().next().unwrap();
    assert_eq!(header, "t,lambda_1,lambda_2,pop_1,pop_2,invariant_residual_local");
    assert_eq!(verify.lines().count(), 2002);

    let back: RunReport = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(back, report);
}

#[test]
fn fig3_report() {
    let dir = TempDir::new().unwrap();
    let report = run_design(&parse_scenario(&bundled("fig3.json")).unwrap(), dir.path()).unwrap();
    assert_eq!(report.exit_code(), 0);
    let fids: Vec<f64> = report.branches.iter().filter_map(|b| b.fidelity).collect();
    assert_eq!(fids.len(), 1);
    assert!(fids.iter().all(|f| *f >= 1.0 - 1e-6));
    assert!(report.branches[1].note.as_deref().unwrap().contains("[2, 3]"));
}

#[test]
fn infeasible_design_reports() {
    let dir = TempDir::new().unwrap();
    let scen = write(dir.path(), "short.json", &format!(r#"{{"t_f": 5, {FIG1_BODY}}}"#));
    let report = run_design(&parse_scenario(&scen).unwrap(), &dir.path().join("out")).unwrap();
    assert!(!report.feasible);
    assert_eq!(report.exit_code(), 2);
    assert!(dir.path().join("out/report.json").exists());
    assert!(!dir.path().join("out/trajectory.csv").exists());
}

#[test]
fn exit_code_contract() {
    let good = RunReport {
        feasible: true,
        boundary_commutators: Some([0.0, 1e-12]),
        boundary_scales: Some([1.0, 1.0]),
        eigenvalue_drift: Some(1e-12),
        invariant_norm: Some(1.0),
        branches: vec![BranchReport { branch: 1, final_branch: Some(1), fidelity: Some(1.0 - 1e-9), note: None }],
        ..Default::default()
    };
    assert_eq!(good.exit_code(), 0);
    assert_eq!(RunReport { feasible: false, ..good.clone() }.exit_code(), 2);
    let mut low = good.clone();
    low.branches[0].fidelity = Some(0.99);
    assert_eq!(low.exit_code(), 3);
    assert_eq!(RunReport { boundary_commutators: Some([1e-3, 0.0]), ..good.clone() }.exit_code(), 3);
    assert_eq!(RunReport { eigenvalue_drift: Some(1e-3), ..good.clone() }.exit_code(), 3);
    assert_eq!(RunReport { verification_error: Some("x".into()), ..good.clone() }.exit_code(), 3);
    let mut none = good.clone();
    none.branches[0].fidelity = None;
    assert_eq!(none.exit_code(), 3);
}

#[test]
fn batch_partitions_outputs() {
    let dir = TempDir::new().unwrap();
    let list = read_batch(&bundled("batch.json")).unwrap();
    assert_eq!(list.len(), 3);
    let results = run_batch(&list, dir.path(), 3).unwrap();
    for ((path, r), name) in results.iter().zip(["fig1", "fig2", "fig3"]) {
        assert!(path.ends_with(format!("{name}.json")));
        assert_eq!(r.as_ref().unwrap().exit_code(), 0);
        assert!(dir.path().join(name).join("report.json").exists());
    }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stadesign"))
}

#[test]
fn binary_exit_codes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("fig1");
    let st = bin().args(["design", bundled("fig1.json").to_str().unwrap(), "-o", out.to_str().unwrap()]).status().unwrap();
    assert_eq!(st.code(), Some(0));
    assert!(out.join("trajectory.csv").exists());

    let short = write(dir.path(), "short.json", &format!(r#"{{"t_f": 5, {FIG1_BODY}}}"#));
    let st = bin().args(["design", short.to_str().unwrap(), "-o", dir.path().join("s").to_str().unwrap()]).status().unwrap();
    assert_eq!(st.code(), Some(2));

    let broken = write(dir.path(), "broken.json", "{");
    assert_eq!(bin().args(["design", broken.to_str().unwrap()]).status().unwrap().code(), Some(1));
    assert_eq!(bin().args(["min-time", bundled("fig1.json").to_str().unwrap(), "--bracket", "1,2"]).output().unwrap().status.code(), Some(2));
    assert_eq!(bin().args(["min-time", bundled("fig1.json").to_str().unwrap(), "--bracket", "x"]).output().unwrap().status.code(), Some(1));

    let o = bin().args(["min-time", bundled("fig3.json").to_str().unwrap(), "--bracket", "1,80"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let r: RunReport = serde_json::from_slice(&o.stdout).unwrap();
    assert!(r.min_time.unwrap() < 80.0);

    let o = bin().args(["algebra-check", "u3s3"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("center basis"));
    assert_eq!(bin().args(["algebra-check", "so5"]).output().unwrap().status.code(), Some(1));
}
