mod common;

use common::{constants, random_f, v};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stadesign::*;

const TOL: f64 = 1e-9;

fn f_strategy(n: usize) -> impl Strategy<Value = DVector<f64>> {
    prop::collection::vec(-3.0..3.0f64, n).prop_map(|x| DVector::from_vec(x))
}

fn consistent(name: &str, f: &DVector<f64>, h: &DVector<f64>) -> (SpectralData, DVector<f64>) {
    let a = build_a_matrix(&constants(name), f).unwrap();
    let f_dot = &a * h;
    (spectral_decompose(&a), f_dot)
}

fn check_projectors(name: &str, f: &DVector<f64>) -> std::result::Result<(), TestCaseError> {
    let a = build_a_matrix(&constants(name), f).unwrap();
    let s = spectral_decompose(&a);
    let (b, q, p) = (&s.pseudoinverse, &s.q_projector, &s.p_projector);
    let n = a.nrows();
    let scale = 1.0 + a.norm();
    prop_assert!((&a * f).amax() <= TOL * scale * f.norm().max(1.0));
    prop_assert!((&a * b * &a - &a).amax() <= TOL * scale);
    prop_assert!((b * &a * b - b).amax() <= TOL * scale * (1.0 + b.norm()).powi(2));
    prop_assert!((q * q - q).amax() <= TOL * (1.0 + q.norm()).powi(2));
    prop_assert!((p + q - DMatrix::identity(n, n)).amax() <= TOL);
    prop_assert!((q * &a).amax() <= TOL * scale * (1.0 + q.norm()));
    prop_assert!((&a * q).amax() <= TOL * scale * (1.0 + q.norm()));
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn projector_algebra_su2(f in f_strategy(3)) {
        check_projectors("su2", &f)?;
    }

    #[test]
    fn projector_algebra_u3s3(f in f_strategy(4)) {
        check_projectors("u3s3", &f)?;
    }

    #[test]
    fn cubic_identity(f in f_strategy(4)) {
        let a3 = build_a_matrix(&constants("su2"), &f.rows(0, 3).into_owned()).unwrap();
        let gamma = f.rows(0, 3).norm_squared();
        prop_assert!((&a3 * &a3 * &a3 + &a3 * gamma).amax() <= 1e-9 * (1.0 + gamma).powf(1.5));

        let a4 = build_a_matrix(&constants("u3s3"), &f).unwrap();
        let g = f[0] * f[0] + f[1] * f[1] + (f[2] + f[3]).powi(2);
        prop_assert!((&a4 * &a4 * &a4 + &a4 * g).amax() <= 1e-9 * (1.0 + g).powf(1.5));
    }

    #[test]
    fn u3s3_null_space(f in f_strategy(4)) {
        prop_assume!(f[0].abs() + f[1].abs() + (f[2] + f[3]).abs() > 1e-3);
        let a = build_a_matrix(&constants("u3s3"), &f).unwrap();
        let s = spectral_decompose(&a);
        prop_assert_eq!(s.null_dim(), 2);
        for w in [v(&[f[0], f[1], f[2] + f[3], 0.0]), v(&[0.0, 0.0, -1.0, 1.0])] {
            prop_assert!((&a * &w).amax() <= 1e-12 * (1.0 + a.norm() * w.norm()));
            let projected = s.null_basis.iter().fold(DVector::zeros(4), |acc, b| acc + b * b.dot(&w));
            prop_assert!((projected - &w).amax() <= 1e-9 * w.norm());
        }
    }

    #[test]
    fn solution_family(
        f in f_strategy(4),
        h in f_strategy(4),
        c in prop::collection::vec(-5.0..5.0f64, 2),
        d in prop::collection::vec(-5.0..5.0f64, 2),
    ) {
        let (s, f_dot) = consistent("u3s3", &f, &h);
        prop_assume!(s.null_dim() == 2);
        let h1 = solve_hamiltonian(&s, &f_dot, &c).unwrap();
        let h2 = solve_hamiltonian(&s, &f_dot, &d).unwrap();
        prop_assert!((&s.a_matrix * &h1 - &f_dot).amax() <= 1e-9 * (1.0 + h1.norm()) * (1.0 + s.a_matrix.norm()));
        prop_assert!((&s.a_matrix * (h1 - h2)).amax() <= 1e-9 * (1.0 + s.a_matrix.norm()) * 20.0);
    }

    #[test]
    fn su2_closed_form(f in f_strategy(3), h in f_strategy(3)) {
        prop_assume!(f[1].abs() > 0.1);
        let (s, f_dot) = consistent("su2", &f, &h);
        let got = solve_constrained(&s, &f_dot, &[(1, 0.0)]).unwrap().h;
        let expect = [f_dot[2] / f[1], 0.0, -f_dot[0] / f[1]];
        for k in 0..3 {
            prop_assert!((got[k] - expect[k]).abs() <= 1e-10 * (1.0 + expect[k].abs()));
        }
    }

    #[test]
    fn u3s3_closed_form(f in f_strategy(4), h in f_strategy(4)) {
        prop_assume!(f[1].abs() > 0.1);
        let (s, f_dot) = consistent("u3s3", &f, &h);
        let got = solve_constrained(&s, &f_dot, &[(1, 0.0), (2, 0.0)]).unwrap().h;
        let expect = [f_dot[2] / f[1], 0.0, 0.0, -f_dot[0] / f[1]];
        for k in 0..4 {
            prop_assert!((got[k] - expect[k]).abs() <= 1e-10 * (1.0 + expect[k].abs()));
        }
    }
}

/// Gauss elimination against the pseudoinverse route, with the fixed set chosen so `h` is unique.
#[test]
fn gauss_matches_pseudoinverse() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (name, fixed_idx) in [("su2", vec![1usize]), ("u3s3", vec![1, 2])] {
        let n = constants(name).n_generators();
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let f = random_f(&mut rng, n);
            let h = common::random_vector(&mut rng, n, 2.0);
            let fixed: Vec<(usize, f64)> = fixed_idx.iter().map(|&k| (k, h[k])).collect();
            let (s, f_dot) = consistent(name, &f, &h);
            let a = solve_constrained(&s, &f_dot, &fixed).unwrap().h;
            let b = gauss_solve(&constants(name), &f, &f_dot, &fixed).unwrap();
            worst = worst.max((a - b).amax());
        }
        assert!(worst <= 1e-9, "{name}: {worst:e}");
    }
}

#[test]
fn inconsistent_rate_is_rejected() {
    let k = constants("su2");
    let f = v(&[0.3, 0.4, 0.5]);
    let radial = &f * 0.1;
    assert!(matches!(gauss_solve(&k, &f, &radial, &[(1, 0.0)]), Err(Error::Inconsistent { .. })));
    let s = spectral_decompose(&build_a_matrix(&k, &f).unwrap());
    assert!(matches!(solve_hamiltonian(&s, &radial, &[0.0]), Err(Error::Inconsistent { .. })));
    assert!(consistency_residual(&s, &radial) > 0.05);
}
