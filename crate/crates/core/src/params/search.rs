use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::family::{g_tilde, h_positive_roots, k0_of_n, k1_of_n, k_of_n, z_of_kn};
use super::{g_bound, is_member, ConeFamilyPoint, Quintuple};
use crate::error::Result;

const SCAN_K_STEPS: usize = 64;
const SCAN_Z_STEPS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeRow {
    pub n: u32,
    pub k: f64,
    /// Undefined for `n = 1`.
    pub k0: Option<f64>,
    pub k1: f64,
    pub z: f64,
    pub g_tilde: f64,
}

pub fn cone_table(n_min: u32, n_max: u32) -> Result<Vec<ConeRow>> {
    (n_min.max(1)..=n_max)
        .map(|n| {
            let k = k_of_n(n)?;
            Ok(ConeRow {
                n,
                k,
                k0: if n >= 2 { Some(k0_of_n(n)?) } else { None },
                k1: k1_of_n(n)?,
                z: z_of_kn(k, n)?,
                g_tilde: g_tilde(n)?,
            })
        })
        .collect()
}

/// Twelve significant digits in positional notation.
pub(crate) fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// CSV with header `n,k,k0,k1,z,g_tilde`; `k0` is blank for `n = 1`.
pub fn cone_table_csv(n_min: u32, n_max: u32) -> Result<String> {
    let mut out = String::from("n,k,k0,k1,z,g_tilde\n");
    for row in cone_table(n_min, n_max)? {
        let k0 = row.k0.map(sig12).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.n,
            sig12(row.k),
            k0,
            sig12(row.k1),
            sig12(row.z),
            sig12(row.g_tilde)
        ));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    point: ConeFamilyPoint,
    value: f64,
}

fn evaluate(point: ConeFamilyPoint) -> Option<Candidate> {
    let q = point.quintuple();
    if !is_member(&q, point.n).ok()? {
        return None;
    }
    let value = g_bound(&q).ok()?;
    value.is_finite().then_some(Candidate { point, value })
}

/// Clamp a chart point back onto the admissible part of the canonical family.
fn project(n: u32, k_min: f64, k: f64, z: f64, scale: f64) -> Option<ConeFamilyPoint> {
    if k <= k_min {
        return ConeFamilyPoint::at_maximiser(n, k_min, scale).ok();
    }
    let (z1, z2) = h_positive_roots(k, n)?;
    Some(ConeFamilyPoint::new(n, k, z.clamp(z1, z2), scale))
}

/// Best admissible quintuple found for the exponent bound `G`.
///
/// A deterministic scan of the canonical family over `k ∈ [k(n), 2k(n)]` and
/// `z ∈ [z1(k), z2(k)]` is followed by `budget` log-uniform perturbations in the
/// `(k, z, scale)` chart, each projected back into the cone. The result is never
/// below `G̃(n)`: the scan contains the point `(k(n), z(k(n), n))`.
pub fn maximize_g(n: u32, budget: usize, seed: u64) -> Result<(Quintuple, f64)> {
    let k_min = k_of_n(n)?;
    let mut best = evaluate(ConeFamilyPoint::at_maximiser(n, k_min, 1.0)?)
        .expect("threshold family point is admissible");

    for i in 1..=SCAN_K_STEPS {
        let k = k_min * (1.0 + i as f64 / SCAN_K_STEPS as f64);
        let Some((z1, z2)) = h_positive_roots(k, n) else {
            continue;
        };
        for j in 0..=SCAN_Z_STEPS {
            let z = z1 + (z2 - z1) * j as f64 / SCAN_Z_STEPS as f64;
            if let Some(c) = evaluate(ConeFamilyPoint::new(n, k, z, 1.0)) {
                if c.value > best.value {
                    best = c;
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..budget {
        let radius = 0.5 * (1.0 - i as f64 / budget as f64) + 1e-3;
        let mut jitter = || rng.gen_range(-radius..=radius).exp();
        let p = best.point;
        let (k, z, scale) = (p.k * jitter(), p.z * jitter(), p.scale * jitter());
        let Some(candidate) = project(n, k_min, k, z, scale).and_then(evaluate) else {
            continue;
        };
        if candidate.value > best.value {
            best = candidate;
        }
    }

    Ok((best.point.quintuple(), best.value))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rows() {
        let csv = cone_table_csv(1, 2).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,k,k0,k1,z,g_tilde");
        assert_eq!(
            lines[1],
            "1,3.00000000000,,2.86007662723,3.00000000000,0.333333333333"
        );
        let cells: Vec<f64> = lines[2].split(',').map(|c| c.parse().unwrap()).collect();
        let want = [2.0, 4.09808, 3.88448, 3.93273, 2.73205, 0.21024];
        for (got, want) in cells.iter().zip(want) {
            assert!((got - want).abs() < 1e-5, "{got} vs {want}");
        }
        assert_eq!(cone_table_csv(3, 2).unwrap(), "n,k,k0,k1,z,g_tilde\n");
    }

    #[test]
    fn sig12_formats() {
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(3.0), "3.00000000000");
        assert_eq!(sig12(12.5), "12.5000000000");
    }

    #[test]
    fn search_never_below_lower_bound() {
        for n in 1..=4 {
            let floor = g_tilde(n).unwrap();
            for budget in [0, 50, 400] {
                let (q, g) = maximize_g(n, budget, 7).unwrap();
                assert!(is_member(&q, n).unwrap());
                assert!(g >= floor - 1e-9, "n={n} budget={budget}: {g} < {floor}");
                assert!((g_bound(&q).unwrap() - g).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn search_is_deterministic() {
        assert_eq!(maximize_g(2, 300, 11).unwrap(), maximize_g(2, 300, 11).unwrap());
    }

    #[test]
    fn family_scan_beats_maximiser_curve() {
        // Off the z = z(k, n) curve, the lower root z1(k) gives a larger bound.
        let (_, g) = maximize_g(1, 0, 0).unwrap();
        assert!(g > 1.0 / 3.0 + 1e-3, "{g}");
    }
}
