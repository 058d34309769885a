//! Positive solutions of `u_t = Δu + u^p` on flat tori.
//!
//! Time stepping is first-order IMEX: the reaction `u^p` is explicit and the
//! diffusion implicit through the Fourier multiplier `1/(1 + dt|ξ|²)`.

mod grid;
pub mod io;
pub mod spectral;
pub mod validation;

use serde::{Deserialize, Serialize};

use crate::error::{Error, GuardKind, Result};

pub use grid::{Grid, ScalarField};
pub use spectral::Spectral;

pub const DEFAULT_BLOWUP_CAP: f64 = 1e6;

/// Largest admissible reaction step, as a fraction of the ODE blow-up time
/// from the initial maximum.
const REACTION_THROTTLE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Completed,
    BlowupGuard,
    NonpositiveGuard,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Keep every `stride`-th step (the initial and final states are always kept).
    pub stride: usize,
    /// `false` drops `u^p` and integrates the heat equation.
    pub reaction: bool,
    pub blowup_cap: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            stride: 1,
            reaction: true,
            blowup_cap: DEFAULT_BLOWUP_CAP,
        }
    }
}

/// Time-ordered positive snapshots of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub p: f64,
    pub dt: f64,
    pub reaction: bool,
    pub blowup_cap: f64,
    pub status: Status,
    pub snapshots: Vec<ScalarField>,
}

impl Trajectory {
    pub fn grid(&self) -> &Grid {
        &self.snapshots[0].grid
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.time).collect()
    }

    pub fn last(&self) -> &ScalarField {
        self.snapshots.last().expect("trajectory has at least one snapshot")
    }

    /// Largest value reached by any snapshot.
    pub fn peak(&self) -> f64 {
        self.snapshots.iter().map(ScalarField::max).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `log10(cap / peak)`: how far the run stayed from the blow-up guard.
    pub fn guard_distance(&self) -> f64 {
        (self.blowup_cap / self.peak()).log10()
    }

    /// Index of the snapshot whose time is closest to `t`.
    pub fn nearest_index(&self, t: f64) -> usize {
        let idx = self.snapshots.partition_point(|s| s.time < t);
        if idx == 0 {
            return 0;
        }
        if idx == self.snapshots.len() {
            return idx - 1;
        }
        if (self.snapshots[idx].time - t) < (t - self.snapshots[idx - 1].time) {
            idx
        } else {
            idx - 1
        }
    }

    /// Checks time ordering, grid consistency and positivity.
    pub fn validate(&self) -> Result<()> {
        let first = self
            .snapshots
            .first()
            .ok_or_else(|| Error::InvalidInput("trajectory has no snapshots".into()))?;
        for pair in self.snapshots.windows(2) {
            if pair[1].time <= pair[0].time {
                return Err(Error::InvalidInput(format!(
                    "snapshot times not increasing: {} then {}",
                    pair[0].time, pair[1].time
                )));
            }
        }
        for s in &self.snapshots {
            if s.grid != first.grid {
                return Err(Error::InvalidInput("snapshots live on different grids".into()));
            }
            if !s.is_positive() {
                return Err(Error::InvalidInput(format!("non-positive snapshot at t = {}", s.time)));
            }
        }
        Ok(())
    }
}

/// `m0^{1−p}/(p−1)`: blow-up time of `u' = u^p` from `u(0) = m0`.
pub fn ode_blowup_time(m0: f64, p: f64) -> Result<f64> {
    if !(m0 > 0.0 && m0.is_finite()) || !(p > 1.0 && p.is_finite()) {
        return Err(Error::Domain(format!("need m0 > 0 and p > 1, got m0={m0}, p={p}")));
    }
    Ok(m0.powf(1.0 - p) / (p - 1.0))
}

/// Solution of `u' = u^p`, `u(0) = m0`, at time `t` before blow-up.
pub fn ode_solution(m0: f64, p: f64, t: f64) -> f64 {
    (m0.powf(1.0 - p) - (p - 1.0) * t).powf(-1.0 / (p - 1.0))
}

/// Reusable IMEX stepper holding the FFT plans of one grid.
pub struct Stepper {
    spectral: Spectral,
    wavenumber_sq: Vec<f64>,
}

impl Stepper {
    pub fn new(grid: &Grid) -> Self {
        let spectral = Spectral::new(grid);
        let wavenumber_sq = spectral.wavenumber_sq();
        Self { spectral, wavenumber_sq }
    }

    pub fn step(&self, u: &ScalarField, dt: f64, p: f64, options: &SolveOptions) -> Result<ScalarField> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidInput(format!("dt must be positive, got {dt}")));
        }
        let explicit: Vec<f64> = if options.reaction {
            u.values.iter().map(|&v| v + dt * v.powf(p)).collect()
        } else {
            u.values.clone()
        };
        let mut spectrum = self.spectral.forward(&explicit);
        for (c, k2) in spectrum.iter_mut().zip(&self.wavenumber_sq) {
            *c /= 1.0 + dt * k2;
        }
        let values = self.spectral.inverse(spectrum);
        let time = u.time + dt;

        if let Some(i) = values.iter().position(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::Guard {
                kind: GuardKind::NonPositive,
                time,
                detail: format!("value {} at index {i}", values[i]),
            });
        }
        let peak = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if peak > options.blowup_cap {
            return Err(Error::Guard {
                kind: GuardKind::BlowUp,
                time,
                detail: format!("max {peak} exceeds cap {}", options.blowup_cap),
            });
        }
        Ok(ScalarField { grid: u.grid, values, time })
    }
}

/// One IMEX step with the reaction on and the default blow-up cap.
pub fn step(u: &ScalarField, dt: f64, p: f64) -> Result<ScalarField> {
    step_with(u, dt, p, &SolveOptions::default())
}

pub fn step_with(u: &ScalarField, dt: f64, p: f64, options: &SolveOptions) -> Result<ScalarField> {
    if !u.is_positive() {
        return Err(Error::InvalidInput("step requires a positive field".into()));
    }
    Stepper::new(&u.grid).step(u, dt, p, options)
}

pub fn solve(u0: &ScalarField, t_end: f64, dt: f64, p: f64) -> Result<Trajectory> {
    solve_with(u0, t_end, dt, p, &SolveOptions::default())
}

/// Integrate from `u0` to `t_end`.
///
/// Guard trips end the run early with the matching [`Status`]; the last stored
/// snapshot is then the last accepted state.
pub fn solve_with(u0: &ScalarField, t_end: f64, dt: f64, p: f64, options: &SolveOptions) -> Result<Trajectory> {
    if !u0.is_positive() {
        return Err(Error::InvalidInput("initial data must be positive".into()));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidInput(format!("t_end must be positive, got {t_end}")));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidInput(format!("dt must be positive, got {dt}")));
    }
    if options.stride == 0 {
        return Err(Error::InvalidInput("stride must be at least 1".into()));
    }
    if !p.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite exponent p = {p}")));
    }
    if options.reaction {
        if p <= 1.0 {
            return Err(Error::InvalidInput(format!("exponent must exceed 1, got p = {p}")));
        }
        let limit = REACTION_THROTTLE * ode_blowup_time(u0.max(), p)?;
        if dt > limit {
            return Err(Error::InvalidInput(format!(
                "dt = {dt} exceeds the reaction stability limit {limit}"
            )));
        }
    }

    let steps = ((t_end / dt) - 1e-9).ceil().max(1.0) as usize;
    let stepper = Stepper::new(&u0.grid);
    let mut snapshots = vec![u0.clone()];
    let mut current = u0.clone();
    let mut status = Status::Completed;

    for i in 1..=steps {
        let target = if i == steps { u0.time + t_end } else { u0.time + i as f64 * dt };
        let h = target - current.time;
        match stepper.step(&current, h, p, options) {
            Ok(mut next) => {
                next.time = target;
                current = next;
            }
            Err(Error::Guard { kind, .. }) => {
                status = match kind {
                    GuardKind::BlowUp => Status::BlowupGuard,
                    GuardKind::NonPositive => Status::NonpositiveGuard,
                };
                break;
            }
            Err(e) => return Err(e),
        }
        if i % options.stride == 0 || i == steps {
            snapshots.push(current.clone());
        }
    }
    if snapshots.last().map(|s| s.time) != Some(current.time) {
        snapshots.push(current);
    }

    Ok(Trajectory {
        p,
        dt,
        reaction: options.reaction,
        blowup_cap: options.blowup_cap,
        status,
        snapshots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sine_mode(points: usize) -> ScalarField {
        let g = Grid::unit(1, points).unwrap();
        ScalarField::from_fn(g, 0.0, |x| 1.0 + 0.5 * (2.0 * PI * x[0]).sin()).unwrap()
    }

    #[test]
    fn constant_field_follows_reaction() {
        let g = Grid::unit(2, 16).unwrap();
        let u = ScalarField::constant(g, 0.7, 0.0).unwrap();
        let next = step(&u, 1e-3, 1.5).unwrap();
        let want = 0.7 + 1e-3 * 0.7f64.powf(1.5);
        for v in &next.values {
            assert!((v - want).abs() < 1e-15);
        }
        assert_eq!(next.time, 1e-3);
    }

    #[test]
    fn heat_step_damps_single_mode() {
        let u = sine_mode(64);
        let dt = 1e-3;
        let heat = SolveOptions { reaction: false, ..Default::default() };
        let next = step_with(&u, dt, 2.0, &heat).unwrap();
        let damping = 1.0 / (1.0 + dt * 4.0 * PI * PI);
        for i in 0..64 {
            let x = i as f64 / 64.0;
            let want = 1.0 + 0.5 * damping * (2.0 * PI * x).sin();
            assert!((next.values[i] - want).abs() < 1e-14);
        }
    }

    #[test]
    fn heat_mode_conserves_mean() {
        let heat = SolveOptions { reaction: false, ..Default::default() };
        let stepper = Stepper::new(&sine_mode(128).grid);
        let mut u = sine_mode(128);
        for _ in 0..50 {
            let next = stepper.step(&u, 1e-3, 2.0, &heat).unwrap();
            assert!((next.mean() - u.mean()).abs() < 1e-12);
            u = next;
        }
    }

    #[test]
    fn guard_errors() {
        let g = Grid::unit(1, 16).unwrap();
        let big = ScalarField::constant(g, 999_999.0, 0.0).unwrap();
        let err = step(&big, 1e-3, 2.0).unwrap_err();
        assert!(matches!(err, Error::Guard { kind: GuardKind::BlowUp, .. }));

        let spike = ScalarField::from_fn(g, 0.0, |x| if x[0] == 0.0 { 100.0 } else { 1e-9 }).unwrap();
        let heat = SolveOptions { reaction: false, ..Default::default() };
        let err = step_with(&spike, 1e-3, 2.0, &heat).unwrap_err();
        assert!(matches!(err, Error::Guard { kind: GuardKind::NonPositive, .. }));
    }

    #[test]
    fn blowup_time_values() {
        assert!((ode_blowup_time(0.5, 1.2).unwrap() - 0.5f64.powf(-0.2) / 0.2).abs() < 1e-12);
        assert!((ode_blowup_time(0.5, 1.2).unwrap() - 5.74349).abs() < 1e-5);
        assert_eq!(ode_blowup_time(1.0, 2.0).unwrap(), 1.0);
        assert!(ode_blowup_time(2.0, 1.5).unwrap() < ode_blowup_time(1.0, 1.5).unwrap());
        assert!(ode_blowup_time(0.0, 2.0).is_err());
        assert!(ode_blowup_time(1.0, 1.0).is_err());
    }

    #[test]
    fn solve_rejects_bad_arguments() {
        let u = sine_mode(16);
        assert!(solve(&u, 0.0, 1e-3, 1.2).is_err());
        assert!(solve(&u, 1.0, -1.0, 1.2).is_err());
        assert!(solve(&u, 1.0, 1e-3, 1.0).is_err());
        // Reaction throttle: 0.1 · 1.5^{-0.2}/0.2 ≈ 0.46.
        assert!(solve(&u, 1.0, 0.5, 1.2).is_err());
    }

    #[test]
    fn stride_and_final_snapshot() {
        let u = sine_mode(16);
        let options = SolveOptions { stride: 3, ..Default::default() };
        let traj = solve_with(&u, 0.01, 1e-3, 1.2, &options).unwrap();
        let times = traj.times();
        assert_eq!(times.len(), 1 + 3 + 1);
        assert!((times.last().unwrap() - 0.01).abs() < 1e-15);
        traj.validate().unwrap();
        assert_eq!(traj.nearest_index(0.0031), 1);
        assert_eq!(traj.nearest_index(5.0), times.len() - 1);
    }

    #[test]
    fn blowup_guard_stops_run() {
        let g = Grid::unit(1, 16).unwrap();
        let u = ScalarField::constant(g, 0.5, 0.0).unwrap();
        let options = SolveOptions { stride: 100, ..Default::default() };
        let traj = solve_with(&u, 10.0, 1e-3, 1.2, &options).unwrap();
        assert_eq!(traj.status, Status::BlowupGuard);
        let tb = ode_blowup_time(0.5, 1.2).unwrap();
        let t_stop = traj.last().time;
        assert!(t_stop < 1.1 * tb && t_stop > 0.9 * tb, "{t_stop} vs {tb}");
        assert!(traj.snapshots.iter().all(|s| s.is_positive() && s.max() <= 1e6));
    }

    #[test]
    fn comparison_with_ode_from_minimum() {
        let u0 = sine_mode(64);
        let options = SolveOptions { stride: 50, ..Default::default() };
        let traj = solve_with(&u0, 1.0, 1e-3, 1.5, &options).unwrap();
        for s in &traj.snapshots {
            assert!(s.min() >= ode_solution(u0.min(), 1.5, s.time) - 1e-3);
        }
    }
}
