#![allow(dead_code)]

use rand::Rng;
use stadesign::{Algebra, DMatrix, DVector, Profile, ScenarioSpec, StructureConstants};

pub fn v(x: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(x)
}

fn su2_spec(name: &str, t_f: f64, h0: &[f64], h1: &[f64], imposed: usize, from: f64, to: f64) -> ScenarioSpec {
    let mut s = ScenarioSpec::new(name, Algebra::builtin("su2").unwrap(), t_f, v(h0), v(h1));
    s.forbidden = vec![1];
    s.imposed = vec![(imposed, Profile::Linear { from, to })];
    s
}

/// h3: 1 → derived, h1 ramped 0 → 0.4.
pub fn fig1(t_f: f64) -> ScenarioSpec {
    su2_spec("fig1", t_f, &[0.0, 0.0, 1.0], &[0.4, 0.0, 0.0], 0, 0.0, 0.4)
}

/// h3 ramped 1 → 0, h1 derived 0 → 2.5.
pub fn fig2(t_f: f64) -> ScenarioSpec {
    su2_spec("fig2", t_f, &[0.0, 0.0, 1.0], &[2.5, 0.0, 0.0], 2, 1.0, 0.0)
}

/// Mott insulator to superfluid: h4 ramped 1 → 0, h1 derived 0 → −4.
pub fn fig3(t_f: f64) -> ScenarioSpec {
    let mut s = ScenarioSpec::new("fig3", Algebra::builtin("u3s3").unwrap(), t_f, v(&[0.0, 0.0, 0.0, 1.0]), v(&[-4.0, 0.0, 0.0, 0.0]));
    s.forbidden = vec![1, 2];
    s.imposed = vec![(3, Profile::Linear { from: 1.0, to: 0.0 })];
    s
}

/// Superfluid back to Mott insulator: h1 ramped −4 → 0, h4 derived 0 → 1.
pub fn fig3_reversed(t_f: f64) -> ScenarioSpec {
    let mut s = ScenarioSpec::new("fig3-reversed", Algebra::builtin("u3s3").unwrap(), t_f, v(&[-4.0, 0.0, 0.0, 0.0]), v(&[0.0, 0.0, 0.0, 1.0]));
    s.forbidden = vec![1, 2];
    s.imposed = vec![(0, Profile::Linear { from: -4.0, to: 0.0 })];
    s.c1 = Some(1.0);
    s
}

pub fn constants(name: &str) -> StructureConstants {
    Algebra::builtin(name).unwrap().constants
}

pub fn random_vector(rng: &mut impl Rng, n: usize, scale: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.gen_range(-scale..scale))
}

/// `f` with `|f_2| ≥ 0.1` so the closed forms that divide by it stay well conditioned.
pub fn random_f(rng: &mut impl Rng, n: usize) -> DVector<f64> {
    let mut f = random_vector(rng, n, 2.0);
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    f[1] = sign * rng.gen_range(0.1..2.0);
    f
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.amax()
}
