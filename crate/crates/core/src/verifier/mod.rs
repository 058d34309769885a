//! Certification of the matrix estimate, its trace, the maximum-principle
//! claim and the path-integrated Harnack inequalities on stored trajectories.
//!
//! Every check scans all grid points of all snapshots with `t > 0` and records
//! the global minimum of a margin field; `pass ⇔ min_margin ≥ −tolerance`.

mod path;
mod report;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fields::{derive_with, f_tensor_at, q_tensor_at, DerivedFields};
use crate::params::{g_bound, is_admissible, Quintuple};
use crate::solver::{Spectral, Trajectory};

pub use path::{
    psi_path, random_queries, verify_harnack_batch, verify_harnack_pair,
    verify_harnack_pair_with, PathQuery, Variant, DEFAULT_LAYERS, DEFAULT_RADIUS,
};
pub use report::{MarginReport, ReportKind, SpaceTime};

pub const DEFAULT_TOLERANCE: f64 = 1e-3;
/// `F` counts as negative semidefinite when `λ_max(F)` is below this.
pub const CLAIM_THRESHOLD: f64 = 1e-12;

/// `ε = 1/(2(θ − b))`.
pub fn eps_of(q: &Quintuple) -> Result<f64> {
    if q.theta <= q.b || !q.theta.is_finite() || !q.b.is_finite() {
        return Err(Error::Domain(format!("ε needs θ > b, got b={}, θ={}", q.b, q.theta)));
    }
    Ok(1.0 / (2.0 * (q.theta - q.b)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub tolerance: f64,
    pub claim_threshold: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { tolerance: DEFAULT_TOLERANCE, claim_threshold: CLAIM_THRESHOLD }
    }
}

/// Checks the hypotheses of the main estimate and returns `ε`.
///
/// `n` must equal the torus dimension; `q` must be admissible and
/// `1 < p < 1 + G(q)`.
pub fn theorem_preconditions(traj: &Trajectory, q: &Quintuple, n: u32) -> Result<f64> {
    check_dimension(traj, n)?;
    let report = is_admissible(q, n, q.default_tolerance())?;
    if !report.member {
        return Err(Error::Precondition(format!(
            "quintuple {q} is not admissible in dimension {n} (margins {:?})",
            report.margins()
        )));
    }
    let g = g_bound(q)?;
    let p = traj.p;
    if !(p > 1.0 && p < 1.0 + g) {
        return Err(Error::Precondition(format!(
            "exponent p = {p} violates 1 < p < 1 + G = {:.12}",
            1.0 + g
        )));
    }
    eps_of(q)
}

pub(crate) fn check_dimension(traj: &Trajectory, n: u32) -> Result<()> {
    let dim = traj.grid().dim;
    if n as usize != dim {
        return Err(Error::Precondition(format!(
            "dimension n = {n} must equal the torus dimension {dim}"
        )));
    }
    Ok(())
}

/// Smallest margin found so far; ties go to the earliest snapshot and point,
/// which keeps parallel reductions deterministic.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    margin: f64,
    snapshot: usize,
    point: usize,
}

impl Candidate {
    fn better(self, other: Self) -> Self {
        let key = |c: &Self| (c.snapshot, c.point);
        match self.margin.total_cmp(&other.margin) {
            std::cmp::Ordering::Less => self,
            std::cmp::Ordering::Greater => other,
            std::cmp::Ordering::Equal => {
                if key(&self) <= key(&other) {
                    self
                } else {
                    other
                }
            }
        }
    }
}

struct Scan {
    best: Option<Candidate>,
    qualifying: usize,
    snapshots: usize,
    last_margin: Option<f64>,
}

/// Minimum of `margin(d, i, t)` over all points of all snapshots with `t > 0`;
/// `None` margins are skipped.
fn scan<M>(traj: &Trajectory, margin: M) -> Result<Scan>
where
    M: Fn(&DerivedFields, usize, f64) -> Option<f64> + Sync,
{
    let spectral = Spectral::new(traj.grid());
    let indices: Vec<usize> =
        (0..traj.snapshots.len()).filter(|&k| traj.snapshots[k].time > 0.0).collect();
    let per_snapshot: Vec<(Option<Candidate>, usize)> = indices
        .par_iter()
        .map(|&k| {
            let u = &traj.snapshots[k];
            let d = derive_with(&spectral, u)?;
            let mut best: Option<Candidate> = None;
            let mut qualifying = 0;
            for i in 0..d.len() {
                if let Some(m) = margin(&d, i, u.time) {
                    qualifying += 1;
                    let c = Candidate { margin: m, snapshot: k, point: i };
                    best = Some(best.map_or(c, |b| b.better(c)));
                }
            }
            Ok((best, qualifying))
        })
        .collect::<Result<_>>()?;

    let best = per_snapshot.iter().filter_map(|(b, _)| *b).reduce(Candidate::better);
    Ok(Scan {
        best,
        qualifying: per_snapshot.iter().map(|(_, q)| q).sum(),
        snapshots: indices.len(),
        last_margin: per_snapshot.last().and_then(|(b, _)| b.map(|c| c.margin)),
    })
}

fn build_report(
    kind: ReportKind,
    traj: &Trajectory,
    scan: &Scan,
    q: &Quintuple,
    n: u32,
    eps: f64,
    options: &VerifyOptions,
) -> MarginReport {
    let argmin = scan.best.map(|c| SpaceTime {
        x: traj.grid().point(c.point),
        t: traj.snapshots[c.snapshot].time,
    });
    let min_margin = scan.best.map_or(f64::INFINITY, |c| c.margin);
    let mut report =
        MarginReport::new(kind, min_margin, argmin, options.tolerance, eps, *q, traj.p, n);
    report.detail("snapshots_checked", scan.snapshots);
    report.detail("status", serde_json::to_value(traj.status).unwrap_or_default());
    report.detail_f64("guard_distance", traj.guard_distance());
    if let Some(last) = scan.last_margin {
        report.detail_f64("final_snapshot_margin", last);
    }
    report
}

/// Pointwise `λ_min(F) + 1/ε`.
pub fn matrix_margin_at(d: &DerivedFields, i: usize, q: &Quintuple, p: f64, t: f64, eps: f64) -> f64 {
    f_tensor_at(d, i, q, p, t).min_eigenvalue() + 1.0 / eps
}

/// Pointwise `t[(θ+na)Δf + (b+nc)|∇f|² + nd e^{(p−1)f}] + n/ε`.
pub fn trace_margin_at(d: &DerivedFields, i: usize, q: &Quintuple, p: f64, t: f64, eps: f64) -> f64 {
    let n = d.dim() as f64;
    t * ((q.theta + n * q.a) * d.lap[i]
        + (q.b + n * q.c) * d.grad_sq[i]
        + n * q.d * d.reaction_factor(i, p))
        + n / eps
}

/// Pointwise `λ_min(θ²Q − F²/(εt²))` where `λ_max(F) ≤ threshold`, else `None`.
pub fn claim_margin_at(
    d: &DerivedFields,
    i: usize,
    q: &Quintuple,
    p: f64,
    t: f64,
    eps: f64,
    threshold: f64,
) -> Option<f64> {
    let f = f_tensor_at(d, i, q, p, t);
    if f.max_eigenvalue() > threshold {
        return None;
    }
    let qm = q_tensor_at(d, i, f, q, p, t);
    let diff = qm.scale(q.theta * q.theta) - f.square().scale(1.0 / (eps * t * t));
    Some(diff.min_eigenvalue())
}

pub fn verify_matrix(traj: &Trajectory, q: &Quintuple, n: u32) -> Result<MarginReport> {
    verify_matrix_with(traj, q, n, &VerifyOptions::default())
}

pub fn verify_matrix_with(
    traj: &Trajectory,
    q: &Quintuple,
    n: u32,
    options: &VerifyOptions,
) -> Result<MarginReport> {
    let eps = theorem_preconditions(traj, q, n)?;
    let p = traj.p;
    let scan = scan(traj, |d, i, t| Some(matrix_margin_at(d, i, q, p, t, eps)))?;
    Ok(build_report(ReportKind::Matrix, traj, &scan, q, n, eps, options))
}

pub fn verify_trace(traj: &Trajectory, q: &Quintuple, n: u32) -> Result<MarginReport> {
    verify_trace_with(traj, q, n, &VerifyOptions::default())
}

pub fn verify_trace_with(
    traj: &Trajectory,
    q: &Quintuple,
    n: u32,
    options: &VerifyOptions,
) -> Result<MarginReport> {
    let eps = theorem_preconditions(traj, q, n)?;
    let p = traj.p;
    let scan = scan(traj, |d, i, t| Some(trace_margin_at(d, i, q, p, t, eps)))?;
    Ok(build_report(ReportKind::Trace, traj, &scan, q, n, eps, options))
}

pub fn verify_claim(traj: &Trajectory, q: &Quintuple, n: u32) -> Result<MarginReport> {
    verify_claim_with(traj, q, n, &VerifyOptions::default())
}

/// Passes vacuously with `min_margin = +∞` when no point has `F ⪯ 0`.
pub fn verify_claim_with(
    traj: &Trajectory,
    q: &Quintuple,
    n: u32,
    options: &VerifyOptions,
) -> Result<MarginReport> {
    let eps = theorem_preconditions(traj, q, n)?;
    let p = traj.p;
    let threshold = options.claim_threshold;
    let scan = scan(traj, |d, i, t| claim_margin_at(d, i, q, p, t, eps, threshold))?;
    let mut report = build_report(ReportKind::Claim, traj, &scan, q, n, eps, options);
    report.detail("qualifying_points", scan.qualifying);
    report.detail_f64("qualifying_threshold", threshold);
    if scan.qualifying == 0 {
        report.note("no point with F ⪯ 0; the claim holds vacuously");
    }
    Ok(report)
}

#[cfg(test)]
mod tests;
