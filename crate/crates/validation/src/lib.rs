//! Scenario builders and a small verdict tally for the acceptance run.

use std::time::{Duration, Instant};

use rand::Rng;
use stadesign::{Algebra, DVector, Profile, ScenarioSpec};

pub fn v(x: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(x)
}

fn su2(name: &str, t_f: f64, h0: &[f64], h1: &[f64], imposed: usize, from: f64, to: f64) -> ScenarioSpec {
    let mut s = ScenarioSpec::new(name, Algebra::builtin("su2").unwrap(), t_f, v(h0), v(h1));
    s.forbidden = vec![1];
    s.imposed = vec![(imposed, Profile::Linear { from, to })];
    s
}

/// h1 ramped 0 → 0.4, h3 derived from 1.
pub fn fig1(t_f: f64) -> ScenarioSpec {
    su2("fig1", t_f, &[0.0, 0.0, 1.0], &[0.4, 0.0, 0.0], 0, 0.0, 0.4)
}

/// h3 ramped 1 → 0, h1 derived up to 2.5.
pub fn fig2(t_f: f64) -> ScenarioSpec {
    su2("fig2", t_f, &[0.0, 0.0, 1.0], &[2.5, 0.0, 0.0], 2, 1.0, 0.0)
}

/// Two bosons in a double well: h4 ramped 1 → 0, h1 derived down to −4.
pub fn fig3(t_f: f64) -> ScenarioSpec {
    let mut s = ScenarioSpec::new("fig3", Algebra::builtin("u3s3").unwrap(), t_f, v(&[0.0, 0.0, 0.0, 1.0]), v(&[-4.0, 0.0, 0.0, 0.0]));
    s.forbidden = vec![1, 2];
    s.imposed = vec![(3, Profile::Linear { from: 1.0, to: 0.0 })];
    s
}

pub fn with_grid(spec: &ScenarioSpec, m: usize) -> ScenarioSpec {
    let mut s = spec.clone();
    s.grid_points = m;
    s
}

/// Uniform in `[-2, 2]^n` with `|f_2| ≥ 0.1`.
pub fn random_f(rng: &mut impl Rng, n: usize) -> DVector<f64> {
    let mut f = DVector::from_fn(n, |_, _| rng.gen_range(-2.0..2.0));
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    f[1] = sign * rng.gen_range(0.1..2.0);
    f
}

pub fn random_h(rng: &mut impl Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.gen_range(-2.0..2.0))
}

pub fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

#[derive(Debug, Default)]
pub struct Tally {
    results: Vec<(u32, bool)>,
}

impl Tally {
    /// Prints the verdict line for criterion `n` followed by indented detail lines.
    pub fn record(&mut self, n: u32, title: &str, pass: bool, details: &[String]) {
        println!("{} criterion {n}: {title}", if pass { "PASS" } else { "FAIL" });
        for d in details {
            println!("    {d}");
        }
        self.results.push((n, pass));
    }

    pub fn failed(&self) -> Vec<u32> {
        self.results.iter().filter(|(_, p)| !p).map(|(n, _)| *n).collect()
    }
}
