//! The admissible parameter cone and the exponent bounds it induces.
//!
//! A [`Quintuple`] `(a, b, c, d, θ)` is admissible in dimension `n` when
//!
//! ```text
//! d ≥ a > c > 0
//! θ > b ≥ 0
//! (a−c)²θ² − a(θ−b)[(2θ+na)(a−c) + a(n−1)(θ−b)] ≥ 0
//! ```
//!
//! Admissible quintuples form a cone: the system is invariant under positive
//! scaling. The canonical family `(z+1, k, 1, z+1, k+1)` reduces the third line
//! to the cubic `H(z, k)` in `z`, which is where the threshold values `k(n)`,
//! `k0(n)`, `k1(n)` and the maximiser `z(k, n)` come from.

mod cubic;
mod family;
mod search;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use cubic::{depressed_cubic_roots, monic_cubic_roots};
pub use family::{
    g_tilde, h_poly, h_positive_roots, k0_of_n, k1_of_n, k_of_n, p1_poly, p2_poly, z_of_kn,
    ConeFamilyPoint,
};
pub use search::{cone_table, cone_table_csv, maximize_g, ConeRow};

/// Five real parameters `(a, b, c, d, θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quintuple {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub theta: f64,
}

impl Quintuple {
    pub const fn new(a: f64, b: f64, c: f64, d: f64, theta: f64) -> Self {
        Self { a, b, c, d, theta }
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self::new(
            lambda * self.a,
            lambda * self.b,
            lambda * self.c,
            lambda * self.d,
            lambda * self.theta,
        )
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.a, self.b, self.c, self.d, self.theta]
    }

    /// Largest absolute component; the natural unit of the cone chart.
    pub fn magnitude(&self) -> f64 {
        self.as_array().iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Boundary tolerance `1e-9 · |q|⁴` for the quartic third inequality.
    pub fn default_tolerance(&self) -> f64 {
        1e-9 * self.magnitude().powi(4)
    }

    fn check_finite(&self) -> Result<()> {
        if self.as_array().iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("non-finite quintuple {self:?}")))
        }
    }
}

impl std::fmt::Display for Quintuple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({}, {}, {}, {}, {})",
            self.a, self.b, self.c, self.d, self.theta
        )
    }
}

/// Slack of each line of the admissibility system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub member: bool,
    /// `min(d − a, a − c, c)`.
    pub ordering_margin: f64,
    /// `min(θ − b, b)`.
    pub exponent_margin: f64,
    /// The quartic third line, evaluated literally.
    pub quartic_margin: f64,
}

impl AdmissibilityReport {
    pub fn margins(&self) -> [f64; 3] {
        [self.ordering_margin, self.exponent_margin, self.quartic_margin]
    }
}

/// Left-hand side of the third admissibility inequality.
pub fn quartic_margin(q: &Quintuple, n: u32) -> f64 {
    let n = n as f64;
    let Quintuple { a, b, c, theta, .. } = *q;
    let gap = a - c;
    let slack = theta - b;
    gap * gap * theta * theta - a * slack * ((2.0 * theta + n * a) * gap + a * (n - 1.0) * slack)
}

pub fn is_admissible(q: &Quintuple, n: u32, tol_boundary: f64) -> Result<AdmissibilityReport> {
    q.check_finite()?;
    if n == 0 {
        return Err(Error::InvalidInput("dimension n must be at least 1".into()));
    }
    if !(tol_boundary.is_finite() && tol_boundary >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "boundary tolerance must be finite and non-negative, got {tol_boundary}"
        )));
    }
    let Quintuple { a, b, c, d, theta } = *q;
    let quartic = quartic_margin(q, n);
    let member = d >= a && a > c && c > 0.0 && theta > b && b >= 0.0 && quartic >= -tol_boundary;
    Ok(AdmissibilityReport {
        member,
        ordering_margin: (d - a).min(a - c).min(c),
        exponent_margin: (theta - b).min(b),
        quartic_margin: quartic,
    })
}

/// Membership with the default boundary tolerance.
pub fn is_member(q: &Quintuple, n: u32) -> Result<bool> {
    Ok(is_admissible(q, n, q.default_tolerance())?.member)
}

/// `G1(b, d, θ) = 4d(θ − b)/θ²`.
pub fn g1(b: f64, d: f64, theta: f64) -> Result<f64> {
    if ![b, d, theta].iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidInput("non-finite argument to G1".into()));
    }
    if !(theta > b && b >= 0.0) {
        return Err(Error::Domain(format!("G1 requires θ > b ≥ 0, got b={b}, θ={theta}")));
    }
    if d <= 0.0 {
        return Err(Error::Domain(format!("G1 requires d > 0, got d={d}")));
    }
    Ok(4.0 * d * (theta - b) / (theta * theta))
}

/// The positive root of `(d−a)θ²x² + (d−c)θ²x − 4cd(θ−b) = 0`.
///
/// Evaluated as `2·4cd(θ−b) / ((d−c)θ² + √disc)`, which is free of
/// cancellation and reduces to the linear root `4cd(θ−b)/((d−c)θ²)` at `d = a`.
pub fn g2(q: &Quintuple) -> Result<f64> {
    q.check_finite()?;
    let Quintuple { a, b, c, d, theta } = *q;
    if theta.is_nan() || b.is_nan() || theta <= b {
        return Err(Error::Domain(format!("G2 requires θ > b, got b={b}, θ={theta}")));
    }
    if !(d >= a && d > c && c > 0.0) {
        return Err(Error::Domain(format!(
            "G2 requires d ≥ a and d > c > 0, got a={a}, c={c}, d={d}"
        )));
    }
    let theta_sq = theta * theta;
    let constant = 4.0 * c * d * (theta - b);
    let linear = (d - c) * theta_sq;
    if d == a {
        return Ok(constant / linear);
    }
    let quadratic = (d - a) * theta_sq;
    let disc = linear * linear + 4.0 * quadratic * constant;
    Ok(2.0 * constant / (linear + disc.sqrt()))
}

/// `G = min(G1, G2)`: the estimates hold for `1 < p < 1 + G`.
pub fn g_bound(q: &Quintuple) -> Result<f64> {
    Ok(g1(q.b, q.d, q.theta)?.min(g2(q)?))
}

/// Sub-cone used by the path-integrated Harnack estimates:
/// admissible, `a = d` and `b − a + c < 0`.
pub fn cprime_member(q: &Quintuple, n: u32) -> Result<bool> {
    let admissible = is_member(q, n)?;
    let equal_ad = (q.a - q.d).abs() <= 1e-12 * q.a.abs().max(q.d.abs());
    Ok(admissible && equal_ad && q.b - q.a + q.c < 0.0)
}
