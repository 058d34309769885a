//! Path-integrated Harnack inequalities.
//!
//! `ψ(x1, x2, t1, t2)` is an infimum over paths `γ: [0,1] → M` from `x2` to
//! `x1` of `∫ kin·|γ̇|² + pot(γ(s), (1−s)t2 + s t1) ds`. It is bounded above by
//! a shortest path through a layered graph: layer `j` sits at `s_j = j/S`,
//! nodes are grid points, and an edge from layer `j` to `j+1` joins points at
//! most `R` cells apart. Every discrete path is an admissible `γ`, so the
//! dynamic-programming value never undercuts the true infimum.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{MarginReport, ReportKind, SpaceTime};
use super::{check_dimension, eps_of, VerifyOptions};
use crate::error::{Error, Result};
use crate::fields::{derive_with, DerivedFields};
use crate::params::{cprime_member, g_bound, is_member, Quintuple};
use crate::solver::{Spectral, Trajectory};

pub const DEFAULT_LAYERS: usize = 32;
pub const DEFAULT_RADIUS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Kinetic weight `a/(4(a−b−c)Δt)`, potential `θΔt/a · ρ`.
    Harn,
    /// Kinetic weight `na/(4(na−nb−nc+θ)Δt)`, potential `θΔt/a · ρ̊`.
    Harn2,
    /// Kinetic weight `(θ+na)/(4(na−nc+θ−b)Δt)`, potential `−θ/(θ+na) · u^{p−1}`.
    Harn3,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Harn => "harn",
            Variant::Harn2 => "harn2",
            Variant::Harn3 => "harn3",
        })
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "harn" => Ok(Variant::Harn),
            "harn2" => Ok(Variant::Harn2),
            "harn3" => Ok(Variant::Harn3),
            other => Err(Error::InvalidInput(format!("unknown Harnack variant {other:?}"))),
        }
    }
}

fn default_layers() -> usize {
    DEFAULT_LAYERS
}

fn default_radius() -> usize {
    DEFAULT_RADIUS
}

/// One Harnack comparison between `(x1, t1)` and `(x2, t2)`.
///
/// Points are grid cell indices, one per axis. Times must be snapshot times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathQuery {
    pub x1: Vec<usize>,
    pub x2: Vec<usize>,
    pub t1: f64,
    pub t2: f64,
    pub variant: Variant,
    #[serde(default = "default_layers")]
    pub layers: usize,
    #[serde(default = "default_radius")]
    pub radius: usize,
    /// Sample the potential at the mid-time of each edge, averaged over its
    /// endpoints, instead of at the destination node.
    #[serde(default)]
    pub midpoint: bool,
}

impl PathQuery {
    pub fn new(x1: Vec<usize>, x2: Vec<usize>, t1: f64, t2: f64, variant: Variant) -> Self {
        Self {
            x1,
            x2,
            t1,
            t2,
            variant,
            layers: DEFAULT_LAYERS,
            radius: DEFAULT_RADIUS,
            midpoint: false,
        }
    }

    pub fn refined(&self) -> Self {
        Self { layers: 2 * self.layers, radius: 2 * self.radius, ..self.clone() }
    }
}

/// Draw `count` queries with independent uniform cells and two distinct
/// positive snapshot times.
pub fn random_queries(
    traj: &Trajectory,
    count: usize,
    variant: Variant,
    seed: u64,
) -> Result<Vec<PathQuery>> {
    let times: Vec<f64> = traj.times().into_iter().filter(|&t| t > 0.0).collect();
    if times.len() < 2 {
        return Err(Error::InvalidInput("need two snapshots with t > 0 for Harnack queries".into()));
    }
    let grid = *traj.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut queries = Vec::with_capacity(count);
    for _ in 0..count {
        let i = rng.gen_range(0..times.len());
        let mut j = rng.gen_range(0..times.len() - 1);
        if j >= i {
            j += 1;
        }
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        let mut cell = || (0..grid.dim).map(|_| rng.gen_range(0..grid.points)).collect::<Vec<_>>();
        let x1 = cell();
        let x2 = cell();
        queries.push(PathQuery::new(x1, x2, times[lo], times[hi], variant));
    }
    Ok(queries)
}

fn snapshot_index(traj: &Trajectory, t: f64, name: &str) -> Result<usize> {
    let k = traj.nearest_index(t);
    let found = traj.snapshots[k].time;
    if (found - t).abs() <= 1e-9 * t.abs().max(1.0) {
        Ok(k)
    } else {
        Err(Error::InvalidInput(format!("{name} = {t} is not a snapshot time (nearest {found})")))
    }
}

fn flat_cell(traj: &Trajectory, x: &[usize], name: &str) -> Result<usize> {
    let grid = traj.grid();
    if x.len() != grid.dim || x.iter().any(|&i| i >= grid.points) {
        return Err(Error::InvalidInput(format!(
            "{name} = {x:?} is not a cell of the {}-dimensional grid with N = {}",
            grid.dim, grid.points
        )));
    }
    let idx = [x[0] as i64, x.get(1).copied().unwrap_or(0) as i64];
    Ok(grid.flat_index(idx))
}

fn variant_preconditions(q: &Quintuple, n: u32, variant: Variant) -> Result<()> {
    match variant {
        Variant::Harn | Variant::Harn2 => {
            if !cprime_member(q, n)? {
                return Err(Error::Precondition(format!(
                    "variant {variant} needs an admissible quintuple with a=d and b-a+c<0; got {q}"
                )));
            }
        }
        Variant::Harn3 => {
            if !is_member(q, n)? {
                return Err(Error::Precondition(format!(
                    "variant {variant} needs an admissible quintuple; got {q}"
                )));
            }
        }
    }
    Ok(())
}

/// Validated query with resolved indices.
struct Resolved {
    x1: usize,
    x2: usize,
    k1: usize,
    k2: usize,
}

fn resolve(traj: &Trajectory, query: &PathQuery, q: &Quintuple, n: u32) -> Result<Resolved> {
    check_dimension(traj, n)?;
    variant_preconditions(q, n, query.variant)?;
    if !(query.t1 > 0.0 && query.t1 < query.t2) {
        return Err(Error::InvalidInput(format!(
            "need 0 < t1 < t2, got t1 = {}, t2 = {}",
            query.t1, query.t2
        )));
    }
    if query.layers < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 layers, got {}", query.layers)));
    }
    let x1 = flat_cell(traj, &query.x1, "x1")?;
    let x2 = flat_cell(traj, &query.x2, "x2")?;
    if query.radius == 0 && x1 != x2 {
        return Err(Error::Config(format!(
            "x1 = {:?} is unreachable from x2 = {:?} with neighbour radius 0",
            query.x1, query.x2
        )));
    }
    let k1 = snapshot_index(traj, query.t1, "t1")?;
    let k2 = snapshot_index(traj, query.t2, "t2")?;
    Ok(Resolved { x1, x2, k1, k2 })
}

/// How the potential of harn3 is weighted.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Harn3Potential {
    /// `−θ/(θ+na) u^{p−1}` as stated.
    Verbatim,
    /// `−(t2−t1) θ/(θ+na) u^{p−1}`, the form the trace estimate integrates to.
    TimeScaled,
}

fn kinetic_weight(q: &Quintuple, n: f64, variant: Variant, span: f64) -> f64 {
    let Quintuple { a, b, c, theta, .. } = *q;
    match variant {
        Variant::Harn => a / (4.0 * (a - b - c) * span),
        Variant::Harn2 => n * a / (4.0 * (n * a - n * b - n * c + theta) * span),
        Variant::Harn3 => (theta + n * a) / (4.0 * (n * a - n * c + theta - b) * span),
    }
}

fn potential_field(
    d: &DerivedFields,
    q: &Quintuple,
    p: f64,
    variant: Variant,
    span: f64,
    harn3: Harn3Potential,
) -> Vec<f64> {
    let n = d.dim() as f64;
    match variant {
        Variant::Harn => d.rho.iter().map(|r| q.theta * span / q.a * r).collect(),
        Variant::Harn2 => d.rho_ring.iter().map(|r| q.theta * span / q.a * r).collect(),
        Variant::Harn3 => {
            let weight = match harn3 {
                Harn3Potential::Verbatim => 1.0,
                Harn3Potential::TimeScaled => span,
            };
            let coef = -weight * q.theta / (q.theta + n * q.a);
            (0..d.len()).map(|i| coef * d.reaction_factor(i, p)).collect()
        }
    }
}

/// Cell offsets within Euclidean radius `R` and their squared physical length.
fn offsets(dim: usize, radius: usize, h: f64) -> Vec<([i64; 2], f64)> {
    let r = radius as i64;
    let mut out = Vec::new();
    let ys = if dim == 2 { -r..=r } else { 0..=0 };
    for dy in ys {
        for dx in -r..=r {
            if dx * dx + dy * dy <= r * r {
                out.push(([dx, dy], ((dx * dx + dy * dy) as f64) * h * h));
            }
        }
    }
    out
}

fn psi_dp(
    traj: &Trajectory,
    query: &PathQuery,
    q: &Quintuple,
    n: u32,
    harn3: Harn3Potential,
) -> Result<f64> {
    let r = resolve(traj, query, q, n)?;
    let grid = *traj.grid();
    let spectral = Spectral::new(&grid);
    let (t1, t2) = (traj.snapshots[r.k1].time, traj.snapshots[r.k2].time);
    let span = t2 - t1;
    let layers = query.layers;
    let ds = 1.0 / layers as f64;
    let kin = kinetic_weight(q, n as f64, query.variant, span);

    // Potentials on the snapshots nearest each sampling time, derived once.
    let mut cache: HashMap<usize, Vec<f64>> = HashMap::new();
    let mut potential_at = |tau: f64| -> Result<usize> {
        let k = traj.nearest_index(tau);
        if let std::collections::hash_map::Entry::Vacant(slot) = cache.entry(k) {
            let d = derive_with(&spectral, &traj.snapshots[k])?;
            slot.insert(potential_field(&d, q, traj.p, query.variant, span, harn3));
        }
        Ok(k)
    };
    let time_of = |s: f64| (1.0 - s) * t2 + s * t1;
    let mut schedule = Vec::with_capacity(layers);
    for j in 1..=layers {
        let tau = if query.midpoint {
            time_of((j as f64 - 0.5) * ds)
        } else {
            time_of(j as f64 * ds)
        };
        schedule.push(potential_at(tau)?);
    }

    let steps = offsets(grid.dim, query.radius, grid.spacing());
    let mut cost = vec![f64::INFINITY; grid.len()];
    cost[r.x2] = 0.0;
    for &k in &schedule {
        let pot = &cache[&k];
        let mut next = vec![f64::INFINITY; grid.len()];
        for (dest, slot) in next.iter_mut().enumerate() {
            let [ix, iy] = grid.multi_index(dest);
            let mut best = f64::INFINITY;
            for &(off, dist_sq) in &steps {
                let src = grid.flat_index([ix as i64 - off[0], iy as i64 - off[1]]);
                let base = cost[src];
                if base.is_finite() {
                    let mut c = base + kin * dist_sq / ds;
                    c += if query.midpoint {
                        ds * 0.5 * (pot[src] + pot[dest])
                    } else {
                        ds * pot[dest]
                    };
                    if c < best {
                        best = c;
                    }
                }
            }
            *slot = best;
        }
        cost = next;
    }
    let psi = cost[r.x1];
    if !psi.is_finite() {
        return Err(Error::Config(format!(
            "x1 = {:?} is unreachable from x2 = {:?} in {} layers of radius {}",
            query.x1, query.x2, query.layers, query.radius
        )));
    }
    Ok(psi)
}

/// Discrete upper bound for `ψ(x1, x2, t1, t2)`.
pub fn psi_path(traj: &Trajectory, query: &PathQuery, q: &Quintuple, n: u32) -> Result<f64> {
    psi_dp(traj, query, q, n, Harn3Potential::Verbatim)
}

/// `log u(x2,t2) + (1/ε) log(t2/t1) + ψ − log u(x1,t1)`.
///
/// The report also carries the margin with exponent `1/(aε)` and, for
/// harn3, the margin obtained with a time-scaled potential term.
pub fn verify_harnack_pair(
    traj: &Trajectory,
    query: &PathQuery,
    q: &Quintuple,
    n: u32,
) -> Result<MarginReport> {
    verify_harnack_pair_with(traj, query, q, n, &VerifyOptions::default())
}

pub fn verify_harnack_pair_with(
    traj: &Trajectory,
    query: &PathQuery,
    q: &Quintuple,
    n: u32,
    options: &VerifyOptions,
) -> Result<MarginReport> {
    let r = resolve(traj, query, q, n)?;
    let eps = eps_of(q)?;
    let psi = psi_path(traj, query, q, n)?;
    let u1 = traj.snapshots[r.k1].values[r.x1];
    let u2 = traj.snapshots[r.k2].values[r.x2];
    let (t1, t2) = (traj.snapshots[r.k1].time, traj.snapshots[r.k2].time);
    let log_ratio = (t2 / t1).ln();
    let base = u2.ln() - u1.ln() + psi;
    let margin = base + log_ratio / eps;

    let grid = traj.grid();
    let argmin = SpaceTime { x: grid.point(r.x1), t: t1 };
    let mut report =
        MarginReport::new(ReportKind::Harnack, margin, Some(argmin), options.tolerance, eps, *q, traj.p, n);
    report.detail("variant", query.variant.to_string());
    report.detail("x1", query.x1.clone());
    report.detail("x2", query.x2.clone());
    report.detail_f64("t1", t1);
    report.detail_f64("t2", t2);
    report.detail("layers", query.layers);
    report.detail("radius", query.radius);
    report.detail("quadrature", if query.midpoint { "midpoint" } else { "destination" });
    report.detail_f64("psi", psi);
    report.detail_f64("exponent", 1.0 / eps);
    report.detail_f64("alt_exponent", 1.0 / (q.a * eps));
    report.detail_f64("alt_margin", base + log_ratio / (q.a * eps));

    if query.variant == Variant::Harn3 {
        let scaled = psi_dp(traj, query, q, n, Harn3Potential::TimeScaled)?;
        report.detail_f64("psi_time_scaled", scaled);
        report.detail_f64("margin_time_scaled", u2.ln() - u1.ln() + scaled + log_ratio / eps);
        report.note(
            "harn3 potential -θ/(θ+na)·u^(p-1) carries no (t2-t1) factor; \
             the time-scaled variant is reported as a diagnostic only",
        );
    }
    match g_bound(q) {
        Ok(g) if traj.p > 1.0 && traj.p < 1.0 + g => {}
        Ok(g) => report.note(format!(
            "p = {} lies outside 1 < p < 1 + G = {:.12}; the estimate is not guaranteed there",
            traj.p,
            1.0 + g
        )),
        Err(e) => report.note(format!("exponent bound unavailable: {e}")),
    }
    Ok(report)
}

/// Reports for many queries, evaluated concurrently, in input order.
pub fn verify_harnack_batch(
    traj: &Trajectory,
    queries: &[PathQuery],
    q: &Quintuple,
    n: u32,
    options: &VerifyOptions,
) -> Result<Vec<MarginReport>> {
    queries.par_iter().map(|query| verify_harnack_pair_with(traj, query, q, n, options)).collect()
}
