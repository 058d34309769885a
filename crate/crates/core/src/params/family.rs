use serde::{Deserialize, Serialize};

use super::cubic::monic_cubic_roots;
use super::Quintuple;
use crate::error::{Error, Result};

/// Coordinates `(n, k, z, scale)` of the canonical family
/// `scale · (z+1, k, 1, z+1, k+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeFamilyPoint {
    pub n: u32,
    pub k: f64,
    pub z: f64,
    pub scale: f64,
}

impl ConeFamilyPoint {
    pub fn new(n: u32, k: f64, z: f64, scale: f64) -> Self {
        Self { n, k, z, scale }
    }

    /// The family point at `k`, with `z` at the local maximum `z(k, n)` of `H`.
    pub fn at_maximiser(n: u32, k: f64, scale: f64) -> Result<Self> {
        Ok(Self::new(n, k, z_of_kn(k, n)?, scale))
    }

    pub fn quintuple(&self) -> Quintuple {
        let Self { k, z, scale, .. } = *self;
        Quintuple::new(z + 1.0, k, 1.0, z + 1.0, k + 1.0).scaled(scale)
    }
}

fn check_dimension(n: u32) -> Result<f64> {
    if n == 0 {
        Err(Error::Domain("dimension n must be at least 1".into()))
    } else {
        Ok(n as f64)
    }
}

/// `H(z, k) = −n z³ + (k² − 3n) z² − (3n + 2k) z − (n − 1)`.
pub fn h_poly(z: f64, k: f64, n: u32) -> f64 {
    let n = n as f64;
    ((-n * z + (k * k - 3.0 * n)) * z - (3.0 * n + 2.0 * k)) * z - (n - 1.0)
}

/// `P1(k) = k³ − (27/4) n k − (27/4) n`; its positive root is `k(n)`.
pub fn p1_poly(k: f64, n: u32) -> f64 {
    let n = n as f64;
    (k * k - 6.75 * n) * k - 6.75 * n
}

/// `P2(k) = k³ − 6 n k − 6 n`; its positive root is `k0(n)`.
pub fn p2_poly(k: f64, n: u32) -> f64 {
    let n = n as f64;
    (k * k - 6.0 * n) * k - 6.0 * n
}

/// Threshold above which `H(·, k)` has two positive roots:
/// `3√n cos(⅓ arccos(1/√n))`.
pub fn k_of_n(n: u32) -> Result<f64> {
    let nf = check_dimension(n)?;
    if n == 1 {
        return Ok(3.0);
    }
    let root_n = nf.sqrt();
    Ok(3.0 * root_n * ((1.0 / root_n).acos() / 3.0).cos())
}

/// Threshold above which `H(·, k)` has two critical points:
/// `2√(2n) cos(⅓ arccos(3/(2√(2n))))`, defined for `n ≥ 2`.
pub fn k0_of_n(n: u32) -> Result<f64> {
    let nf = check_dimension(n)?;
    let radius = (2.0 * nf).sqrt();
    let arg = 3.0 / (2.0 * radius);
    if arg > 1.0 {
        return Err(Error::Domain(format!(
            "k0(n) needs n ≥ 2: arccos argument 3/(2√(2n)) = {arg} exceeds 1 at n = {n}"
        )));
    }
    Ok(2.0 * radius * (arg.acos() / 3.0).cos())
}

/// `(1 + √(1 + 108 n)) / 4`, the point where `z(k, n) = 2`.
pub fn k1_of_n(n: u32) -> Result<f64> {
    let nf = check_dimension(n)?;
    Ok((1.0 + (1.0 + 108.0 * nf).sqrt()) / 4.0)
}

/// Local maximum of `H(·, k)`: `(k² − 3n + √(k⁴ − 6nk² − 6nk)) / (3n)`.
pub fn z_of_kn(k: f64, n: u32) -> Result<f64> {
    let nf = check_dimension(n)?;
    if !k.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite k = {k}")));
    }
    let k_sq = k * k;
    let radicand = k_sq * k_sq - 6.0 * nf * k_sq - 6.0 * nf * k;
    if radicand < 0.0 {
        return Err(Error::Domain(format!(
            "z(k, n) undefined: k⁴ − 6nk² − 6nk = {radicand} < 0 at k = {k}, n = {n}"
        )));
    }
    Ok((k_sq - 3.0 * nf + radicand.sqrt()) / (3.0 * nf))
}

/// `G̃(n) = 4/(k(n)+1)² · (1 + 1/z(k(n), n))`.
pub fn g_tilde(n: u32) -> Result<f64> {
    let k = k_of_n(n)?;
    let z = z_of_kn(k, n)?;
    Ok(4.0 / ((k + 1.0) * (k + 1.0)) * (1.0 + 1.0 / z))
}

/// Positive roots `z1 ≤ z2` of `H(·, k)`, when two exist.
///
/// At `n = 1` the cubic has the trivial root `z = 0`, which is not counted.
pub fn h_positive_roots(k: f64, n: u32) -> Option<(f64, f64)> {
    let nf = n as f64;
    if n == 0 || !k.is_finite() {
        return None;
    }
    let roots = monic_cubic_roots(
        -(k * k - 3.0 * nf) / nf,
        (3.0 * nf + 2.0 * k) / nf,
        (nf - 1.0) / nf,
    );
    let floor = 1e-12 * (1.0 + k * k);
    let positive: Vec<f64> = roots.into_iter().filter(|&z| z > floor).collect();
    match positive.as_slice() {
        [z1, z2] => Some((*z1, *z2)),
        _ => None,
    }
}
