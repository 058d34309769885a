//! Real roots of depressed cubics `x³ + p·x + q = 0`.
//!
//! Three real roots (including the repeated-root boundary) are produced by the
//! trigonometric construction; a single real root by the hyperbolic one.

use std::f64::consts::PI;

/// Relative width of the band around a vanishing discriminant that is routed
/// through the trigonometric branch.
const DISCRIMINANT_BAND: f64 = 1e-14;

/// All real roots of `x³ + p·x + q`, sorted ascending, repeated roots listed
/// with multiplicity when they are resolved by the trigonometric branch.
pub fn depressed_cubic_roots(p: f64, q: f64) -> Vec<f64> {
    if p == 0.0 && q == 0.0 {
        return vec![0.0; 3];
    }
    if p == 0.0 {
        return vec![polish(p, q, (-q).cbrt())];
    }

    // 4p³ + 27q² is minus the discriminant.
    let cube = 4.0 * p * p * p;
    let square = 27.0 * q * q;
    let neg_disc = cube + square;

    let mut roots = if p < 0.0 && neg_disc <= DISCRIMINANT_BAND * (cube.abs() + square) {
        let amplitude = 2.0 * (-p / 3.0).sqrt();
        let arg = (1.5 * q / p * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let phase = arg.acos() / 3.0;
        (0..3)
            .map(|j| amplitude * (phase - 2.0 * PI * j as f64 / 3.0).cos())
            .collect::<Vec<_>>()
    } else if p < 0.0 {
        let scale = 2.0 * (-p / 3.0).sqrt();
        let arg = -1.5 * q.abs() / p * (-3.0 / p).sqrt();
        vec![-q.signum() * scale * (arg.acosh() / 3.0).cosh()]
    } else {
        let scale = 2.0 * (p / 3.0).sqrt();
        let arg = 1.5 * q / p * (3.0 / p).sqrt();
        vec![-scale * (arg.asinh() / 3.0).sinh()]
    };

    for r in roots.iter_mut() {
        *r = polish(p, q, *r);
    }
    roots.sort_by(f64::total_cmp);
    roots
}

/// One guarded Newton step; kept only when it lowers the residual.
fn polish(p: f64, q: f64, x: f64) -> f64 {
    let residual = |x: f64| (x * x + p) * x + q;
    let slope = 3.0 * x * x + p;
    if slope == 0.0 {
        return x;
    }
    let refined = x - residual(x) / slope;
    if refined.is_finite() && residual(refined).abs() < residual(x).abs() {
        refined
    } else {
        x
    }
}

/// Real roots of the monic cubic `x³ + b·x² + c·x + d`, via the shift `x = y − b/3`.
pub fn monic_cubic_roots(b: f64, c: f64, d: f64) -> Vec<f64> {
    let shift = b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let mut roots: Vec<f64> = depressed_cubic_roots(p, q)
        .into_iter()
        .map(|y| {
            let x = y - shift;
            // Newton on the undepressed form removes the shift's cancellation.
            let value = ((x + b) * x + c) * x + d;
            let slope = (3.0 * x + 2.0 * b) * x + c;
            if slope != 0.0 {
                let refined = x - value / slope;
                let refined_value = ((refined + b) * refined + c) * refined + d;
                if refined.is_finite() && refined_value.abs() < value.abs() {
                    return refined;
                }
            }
            x
        })
        .collect();
    roots.sort_by(f64::total_cmp);
    roots
}
