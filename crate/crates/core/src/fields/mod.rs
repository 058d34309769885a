//! Post-processing of solution snapshots: `f = log u`, spectral derivatives of
//! `f`, and the tensors built from them.
//!
//! On the flat torus the metric is `δ_ij` and the manifold dimension is the
//! grid dimension, so every `g_ij` term below is a multiple of the identity.

mod tensor;

use crate::error::{Error, Result};
use crate::params::Quintuple;
use crate::solver::{Grid, ScalarField, Spectral, Trajectory};

pub use tensor::{SymMat, TensorField};

/// `f = log u` and its derivatives at a common time.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedFields {
    pub grid: Grid,
    pub time: f64,
    pub f: Vec<f64>,
    /// One array per axis.
    pub grad: Vec<Vec<f64>>,
    pub hess: TensorField,
    /// `Δf`, the trace of the Hessian.
    pub lap: Vec<f64>,
    /// `|∇f|²`.
    pub grad_sq: Vec<f64>,
    /// Spectral radius of the Hessian.
    pub rho: Vec<f64>,
    /// Spectral radius of the tracefree Hessian.
    pub rho_ring: Vec<f64>,
}

impl DerivedFields {
    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.grid.dim
    }

    pub fn gradient_at(&self, i: usize) -> [f64; 2] {
        [self.grad[0][i], if self.dim() == 2 { self.grad[1][i] } else { 0.0 }]
    }

    /// `e^{(p−1)f} = u^{p−1}`.
    pub fn reaction_factor(&self, i: usize, p: f64) -> f64 {
        ((p - 1.0) * self.f[i]).exp()
    }
}

pub fn derive(u: &ScalarField) -> Result<DerivedFields> {
    derive_with(&Spectral::new(&u.grid), u)
}

/// [`derive`] reusing the FFT plans of `spectral`.
pub fn derive_with(spectral: &Spectral, u: &ScalarField) -> Result<DerivedFields> {
    if spectral.grid() != &u.grid {
        return Err(Error::InvalidInput("spectral plan built for a different grid".into()));
    }
    if let Some(i) = u.values.iter().position(|&v| v.is_nan() || v <= 0.0) {
        return Err(Error::Domain(format!("log u needs u > 0; u = {} at index {i}", u.values[i])));
    }
    let grid = u.grid;
    let f: Vec<f64> = u.values.iter().map(|v| v.ln()).collect();
    let spectrum = spectral.forward(&f);

    let (grad, hess) = if grid.dim == 1 {
        let fx = spectral.derivative(&spectrum, [1, 0]);
        let fxx = spectral.derivative(&spectrum, [2, 0]);
        let hess = TensorField { grid, time: u.time, components: vec![fxx] };
        (vec![fx], hess)
    } else {
        let fx = spectral.derivative(&spectrum, [1, 0]);
        let fy = spectral.derivative(&spectrum, [0, 1]);
        let fxx = spectral.derivative(&spectrum, [2, 0]);
        let fxy = spectral.derivative(&spectrum, [1, 1]);
        let fyy = spectral.derivative(&spectrum, [0, 2]);
        let hess = TensorField { grid, time: u.time, components: vec![fxx, fxy, fyy] };
        (vec![fx, fy], hess)
    };

    let n = grid.len();
    let mut lap = Vec::with_capacity(n);
    let mut grad_sq = Vec::with_capacity(n);
    let mut rho = Vec::with_capacity(n);
    let mut rho_ring = Vec::with_capacity(n);
    for i in 0..n {
        let h = hess.at(i);
        lap.push(h.trace());
        grad_sq.push(grad.iter().map(|g| g[i] * g[i]).sum());
        rho.push(h.spectral_radius());
        rho_ring.push(h.tracefree().spectral_radius());
    }

    Ok(DerivedFields { grid, time: u.time, f, grad, hess, lap, grad_sq, rho, rho_ring })
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("tensor assembly needs t > 0, got {t}")))
    }
}

/// `F` at one grid point:
/// `t(θ f_ij + aΔf g_ij + b f_i f_j + c|∇f|² g_ij + d e^{(p−1)f} g_ij)`.
pub fn f_tensor_at(d: &DerivedFields, i: usize, q: &Quintuple, p: f64, t: f64) -> SymMat {
    let dim = d.dim();
    let isotropic = q.a * d.lap[i] + q.c * d.grad_sq[i] + q.d * d.reaction_factor(i, p);
    let inner = d.hess.at(i).scale(q.theta)
        + SymMat::outer(dim, d.gradient_at(i)).scale(q.b)
        + SymMat::identity(dim, isotropic);
    inner.scale(t)
}

pub fn f_tensor(d: &DerivedFields, q: &Quintuple, p: f64, t: f64) -> Result<TensorField> {
    check_time(t)?;
    Ok(TensorField::from_fn(d.grid, d.time, |i| f_tensor_at(d, i, q, p, t)))
}

/// `Q` at one grid point, given `F` there:
///
/// ```text
/// Q = (p−1)e F/t + (p−1)[b+(p−1)θ] e ∇f∇fᵀ + (p−1)[c+a(p−1)−dp] e |∇f|² g
///     + 2(θ−b) ∇²f·∇²f + 2(a−c)|∇²f|² g,          e = e^{(p−1)f}
/// ```
pub fn q_tensor_at(d: &DerivedFields, i: usize, f: SymMat, q: &Quintuple, p: f64, t: f64) -> SymMat {
    let dim = d.dim();
    let e = d.reaction_factor(i, p);
    let h = d.hess.at(i);
    let pm = p - 1.0;
    f.scale(pm * e / t)
        + SymMat::outer(dim, d.gradient_at(i)).scale(pm * (q.b + pm * q.theta) * e)
        + SymMat::identity(
            dim,
            pm * (q.c + q.a * pm - q.d * p) * e * d.grad_sq[i]
                + 2.0 * (q.a - q.c) * h.norm_sq(),
        )
        + h.square().scale(2.0 * (q.theta - q.b))
}

pub fn q_tensor(d: &DerivedFields, f: &TensorField, q: &Quintuple, p: f64, t: f64) -> Result<TensorField> {
    check_time(t)?;
    if f.grid != d.grid {
        return Err(Error::InvalidInput("F and derived fields live on different grids".into()));
    }
    Ok(TensorField::from_fn(d.grid, d.time, |i| q_tensor_at(d, i, f.at(i), q, p, t)))
}

/// Max-norm of `∂_t f − Δf − |∇f|² − e^{(p−1)f}` at snapshot `index`, with
/// `∂_t f` from a three-point difference over the neighbouring snapshots.
/// The reaction term is dropped for heat-only trajectories.
pub fn evolution_residual(traj: &Trajectory, index: usize) -> Result<f64> {
    let last = traj.snapshots.len().saturating_sub(1);
    if index == 0 || index >= last {
        return Err(Error::InvalidInput(format!(
            "residual index must lie in 1..{last}, got {index}"
        )));
    }
    let spectral = Spectral::new(traj.grid());
    let prev = &traj.snapshots[index - 1];
    let mid = &traj.snapshots[index];
    let next = &traj.snapshots[index + 1];
    let d = derive_with(&spectral, mid)?;

    let back = mid.time - prev.time;
    let ahead = next.time - mid.time;
    // Three-point derivative on a possibly non-uniform stencil.
    let w_next = back / (ahead * (back + ahead));
    let w_prev = -ahead / (back * (back + ahead));
    let w_mid = -(w_next + w_prev);

    let mut worst = 0.0f64;
    for i in 0..d.len() {
        let ft = w_next * next.values[i].ln() + w_mid * d.f[i] + w_prev * prev.values[i].ln();
        let mut rhs = d.lap[i] + d.grad_sq[i];
        if traj.reaction {
            rhs += d.reaction_factor(i, traj.p);
        }
        worst = worst.max((ft - rhs).abs());
    }
    Ok(worst)
}
