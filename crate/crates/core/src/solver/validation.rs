//! Exact-solution checks for the integrator.

use std::f64::consts::PI;

use serde::Serialize;

use super::{ode_blowup_time, solve_with, Grid, ScalarField, SolveOptions, Status};
use crate::error::Result;

/// One comparison of a computed quantity against its closed form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationCheck {
    pub name: String,
    pub error: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub detail: String,
}

impl ValidationCheck {
    fn new(name: &str, error: f64, tolerance: f64, detail: String) -> Self {
        Self { name: name.into(), error, tolerance, pass: error <= tolerance, detail }
    }
}

/// Heat equation from `1 + 0.5 sin 2πx`: exact solution
/// `1 + 0.5 e^{−4π²t} sin 2πx`. Error is the max norm at `t_end`.
pub fn heat_exact(points: usize, dt: f64, t_end: f64, tolerance: f64) -> Result<ValidationCheck> {
    let grid = Grid::unit(1, points)?;
    let u0 = ScalarField::from_fn(grid, 0.0, |x| 1.0 + 0.5 * (2.0 * PI * x[0]).sin())?;
    let options = SolveOptions { stride: usize::MAX, reaction: false, ..Default::default() };
    let traj = solve_with(&u0, t_end, dt, 2.0, &options)?;
    let last = traj.last();
    let decay = (-4.0 * PI * PI * last.time).exp();
    let exact = ScalarField::from_fn(grid, last.time, |x| 1.0 + 0.5 * decay * (2.0 * PI * x[0]).sin())?;
    Ok(ValidationCheck::new(
        "heat_exact",
        last.max_abs_diff(&exact),
        tolerance,
        format!("N={points}, dt={dt}, t={}", last.time),
    ))
}

/// Space-constant solution `((p−1)(T−t))^{−1/(p−1)}`; relative error at `T/2`.
pub fn space_constant_exact(
    blowup: f64,
    p: f64,
    dt: f64,
    tolerance: f64,
) -> Result<ValidationCheck> {
    let exact = |t: f64| ((p - 1.0) * (blowup - t)).powf(-1.0 / (p - 1.0));
    let grid = Grid::unit(1, 16)?;
    let u0 = ScalarField::constant(grid, exact(0.0), 0.0)?;
    let t_end = blowup / 2.0;
    let options = SolveOptions { stride: usize::MAX, ..Default::default() };
    let traj = solve_with(&u0, t_end, dt, p, &options)?;
    let last = traj.last();
    let want = exact(last.time);
    let error = last.values.iter().map(|v| (v - want).abs() / want).fold(0.0, f64::max);
    Ok(ValidationCheck::new(
        "space_constant_exact",
        error,
        tolerance,
        format!("T={blowup}, p={p}, dt={dt}, t={}", last.time),
    ))
}

/// Constant data `m0` must trip the blow-up guard within `slack` (relative)
/// of the ODE blow-up time. The error is the relative deviation.
pub fn blowup_guard(m0: f64, p: f64, dt: f64, slack: f64) -> Result<ValidationCheck> {
    let predicted = ode_blowup_time(m0, p)?;
    let grid = Grid::unit(1, 16)?;
    let u0 = ScalarField::constant(grid, m0, 0.0)?;
    let options = SolveOptions { stride: usize::MAX, ..Default::default() };
    let traj = solve_with(&u0, 2.0 * predicted, dt, p, &options)?;
    let tripped = traj.status == Status::BlowupGuard;
    let at = traj.last().time;
    let error = if tripped { (at - predicted).abs() / predicted } else { f64::INFINITY };
    Ok(ValidationCheck::new(
        "blowup_guard",
        error,
        slack,
        format!("m0={m0}, p={p}, dt={dt}, predicted={predicted}, tripped_at={at}, status={:?}", traj.status),
    ))
}

/// The default battery run by the `validate` subcommand.
pub fn standard_checks() -> Result<Vec<ValidationCheck>> {
    Ok(vec![
        heat_exact(256, 1e-6, 0.1, 1e-6)?,
        space_constant_exact(2.0, 1.5, 1e-5, 1e-4)?,
        blowup_guard(0.5, 1.2, 1e-3, 0.1)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coarse_heat_check_is_first_order() {
        let a = heat_exact(64, 1e-3, 0.1, 1.0).unwrap().error;
        let b = heat_exact(64, 5e-4, 0.1, 1.0).unwrap().error;
        assert!((a / b - 2.0).abs() < 0.1, "{a} {b}");
    }

    #[test]
    fn blowup_check_trips() {
        let check = blowup_guard(0.5, 1.2, 1e-2, 0.1).unwrap();
        assert!(check.pass, "{check:?}");
    }

    #[test]
    fn space_constant_check_passes_coarsely() {
        let check = space_constant_exact(2.0, 1.5, 1e-3, 1e-2).unwrap();
        assert!(check.pass, "{check:?}");
    }
}
