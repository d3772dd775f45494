use super::{design, plan, reduced, ScenarioSpec};
use crate::error::{Error, Result};

const BRACKET: f64 = 0.5;

fn bisect(t_low: f64, t_high: f64, mut feasible: impl FnMut(f64) -> Result<bool>) -> Result<f64> {
    if !(t_low > 0.0 && t_high >= t_low && t_high.is_finite()) {
        return Err(Error::InvalidScenario("min-time bracket must satisfy 0 < lo ≤ hi".into()));
    }
    if !feasible(t_high)? {
        return Err(Error::NoFeasibleTime { t_high });
    }
    if feasible(t_low)? {
        return Ok(t_low);
    }
    let (mut lo, mut hi) = (t_low, t_high);
    while hi - lo > BRACKET {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Smallest feasible `t_f` in `[t_low, t_high]`, bracketed to 0.5.
pub fn min_time_scan(spec: &ScenarioSpec, t_low: f64, t_high: f64) -> Result<f64> {
    bisect(t_low, t_high, |t| match design(&spec.with_t_f(t)) {
        Ok(_) => Ok(true),
        Err(Error::Infeasible { .. }) => Ok(false),
        Err(e) => Err(e),
    })
}

/// First interior grid time where the plain polynomial violates the square-root condition,
/// with no special treatment of singular endpoints. Diagnostic only.
pub fn literal_first_violation(spec: &ScenarioSpec) -> Result<Option<f64>> {
    let plan = plan(spec)?;
    reduced::literal_violation(spec, &plan)
}

/// Bisection on [`literal_first_violation`].
pub fn literal_min_time_scan(spec: &ScenarioSpec, t_low: f64, t_high: f64) -> Result<f64> {
    bisect(t_low, t_high, |t| literal_first_violation(&spec.with_t_f(t)).map(|v| v.is_none()))
}
