use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::fields::derive;
use crate::solver::{solve_with, Grid, ScalarField, SolveOptions, Status};

const REF: Quintuple = Quintuple::new(4.0, 3.0, 1.0, 4.0, 4.0);
const CPRIME: Quintuple = Quintuple::new(9.22063, 4.0, 1.0, 9.22063, 5.0);

fn exact_constant(p: f64, blowup: f64, t: f64) -> f64 {
    ((p - 1.0) * (blowup - t)).powf(-1.0 / (p - 1.0))
}

/// Analytic space-constant trajectory sampled at `times`.
fn space_constant(dim: usize, p: f64, blowup: f64, times: &[f64]) -> Trajectory {
    let g = Grid::unit(dim, 16).unwrap();
    Trajectory {
        p,
        dt: 1e-3,
        reaction: true,
        blowup_cap: 1e6,
        status: Status::Completed,
        snapshots: times
            .iter()
            .map(|&t| ScalarField::constant(g, exact_constant(p, blowup, t), t).unwrap())
            .collect(),
    }
}

fn sine_run(points: usize, t_end: f64, dt: f64, stride: usize, p: f64) -> Trajectory {
    let g = Grid::unit(1, points).unwrap();
    let u0 = ScalarField::from_fn(g, 0.0, |x| 1.0 + 0.5 * (2.0 * PI * x[0]).sin()).unwrap();
    solve_with(&u0, t_end, dt, p, &SolveOptions { stride, ..Default::default() }).unwrap()
}

fn concave_run(t_end: f64) -> Trajectory {
    let g = Grid::unit(1, 128).unwrap();
    let u0 = ScalarField::from_fn(g, 0.0, |x| 0.5 * (-(2.0 * PI * x[0]).cos()).exp()).unwrap();
    solve_with(&u0, t_end, 1e-4, 1.1, &SolveOptions { stride: 5, ..Default::default() }).unwrap()
}

#[test]
fn epsilon_examples() {
    assert_eq!(eps_of(&REF).unwrap(), 0.5);
    assert_eq!(eps_of(&Quintuple::new(1.0, 0.5, 0.5, 1.0, 1.0)).unwrap(), 1.0);
    for lambda in [0.5, 2.0, 7.0] {
        let scaled = eps_of(&REF.scaled(lambda)).unwrap();
        assert!((scaled - 0.5 / lambda).abs() < 1e-15);
    }
    assert!(eps_of(&Quintuple::new(4.0, 4.0, 1.0, 4.0, 4.0)).is_err());
}

#[test]
fn matrix_on_space_constant_solution() {
    let (p, blowup) = (1.2, 2.0);
    let times = [0.0, 0.1, 0.2, 0.4];
    let traj = space_constant(1, p, blowup, &times);
    let report = verify_matrix(&traj, &REF, 1).unwrap();
    // F = t d /((p−1)(T−t)) g, smallest at the first positive time.
    let want = 2.0 + 0.1 * 4.0 / ((p - 1.0) * (blowup - 0.1));
    assert!((report.min_margin - want).abs() < 1e-12, "{}", report.min_margin);
    assert!(report.pass && report.min_margin > 1.0 / report.epsilon);
    assert_eq!(report.argmin.as_ref().unwrap().t, 0.1);
    assert_eq!(report.details["snapshots_checked"], 3);
}

#[test]
fn trace_on_space_constant_solution() {
    let (p, blowup) = (1.2, 2.0);
    let traj = space_constant(2, p, blowup, &[0.0, 0.05, 0.3]);
    let q = crate::params::ConeFamilyPoint::at_maximiser(2, crate::params::k_of_n(2).unwrap(), 1.0)
        .unwrap()
        .quintuple();
    let report = verify_trace(&traj, &q, 2).unwrap();
    let eps = eps_of(&q).unwrap();
    let u = exact_constant(p, blowup, 0.05);
    let want = 2.0 / eps + 0.05 * 2.0 * q.d * u.powf(p - 1.0);
    assert!((report.min_margin - want).abs() < 1e-12);
}

#[test]
fn trace_margin_tends_to_n_over_eps_for_frozen_unit_field() {
    let g = Grid::unit(1, 16).unwrap();
    let d = derive(&ScalarField::constant(g, 1.0, 0.0).unwrap()).unwrap();
    let eps = eps_of(&REF).unwrap();
    let mut previous = f64::INFINITY;
    for t in [1e-1, 1e-3, 1e-6] {
        let m = trace_margin_at(&d, 0, &REF, 1.2, t, eps);
        assert!(m < previous && m > 1.0 / eps);
        previous = m;
    }
    assert!((previous - 1.0 / eps).abs() < 1e-5);
}

#[test]
fn exponent_precondition_cites_bound() {
    let traj = space_constant(1, 1.5, 2.0, &[0.0, 0.1]);
    let err = verify_matrix(&traj, &REF, 1).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)));
    assert!(err.to_string().contains("1 + G = 1.333333333333"), "{err}");
    let at_bound = space_constant(1, 4.0 / 3.0, 5.0, &[0.0, 0.1]);
    assert!(verify_trace(&at_bound, &REF, 1).is_err());
}

#[test]
fn dimension_and_admissibility_preconditions() {
    let traj = space_constant(1, 1.2, 2.0, &[0.0, 0.1]);
    assert!(matches!(verify_matrix(&traj, &REF, 2), Err(Error::Precondition(_))));
    let outside = Quintuple::new(1.0, 3.0, 1.0, 4.0, 4.0);
    assert!(matches!(verify_claim(&traj, &outside, 1), Err(Error::Precondition(_))));
}

#[test]
fn claim_is_vacuous_when_f_positive() {
    let traj = space_constant(1, 1.2, 2.0, &[0.0, 0.1, 0.2]);
    let report = verify_claim(&traj, &REF, 1).unwrap();
    assert!(report.pass && report.min_margin == f64::INFINITY && report.argmin.is_none());
    assert_eq!(report.details["qualifying_points"], 0);
    assert!(report.to_json_line().unwrap().contains(r#""min_margin":"inf""#));
}

#[test]
fn claim_on_concave_transient() {
    let traj = concave_run(0.01);
    let report = verify_claim(&traj, &REF, 1).unwrap();
    let count = report.details["qualifying_points"].as_u64().unwrap();
    assert!(count > 0);
    assert!(report.pass, "{}", report.min_margin);
}

#[test]
fn matrix_implies_trace_pointwise() {
    let traj = sine_run(64, 0.05, 1e-3, 5, 1.2);
    let eps = eps_of(&REF).unwrap();
    for u in traj.snapshots.iter().skip(1) {
        let d = derive(u).unwrap();
        for i in 0..d.len() {
            let m = matrix_margin_at(&d, i, &REF, traj.p, u.time, eps);
            let tr = trace_margin_at(&d, i, &REF, traj.p, u.time, eps);
            assert!(tr >= m - 1e-10);
        }
    }
}

#[test]
fn matrix_and_trace_pass_on_short_sine_run() {
    let traj = sine_run(64, 0.2, 1e-3, 10, 1.2);
    let m = verify_matrix(&traj, &REF, 1).unwrap();
    let t = verify_trace(&traj, &REF, 1).unwrap();
    assert!(m.pass && t.pass);
    assert!(t.min_margin >= m.min_margin - 1e-10);
}

#[test]
fn verdict_is_scale_covariant() {
    let traj = sine_run(64, 0.1, 1e-3, 10, 1.2);
    let base = verify_matrix(&traj, &REF, 1).unwrap();
    for lambda in [0.5, 2.0] {
        let scaled = verify_matrix(&traj, &REF.scaled(lambda), 1).unwrap();
        assert_eq!(scaled.pass, base.pass);
        assert!((scaled.min_margin - lambda * base.min_margin).abs() < 1e-9 * (1.0 + base.min_margin.abs()));
    }
}

#[test]
fn reports_are_deterministic() {
    let traj = sine_run(64, 0.05, 1e-3, 1, 1.2);
    let a = verify_matrix(&traj, &REF, 1).unwrap().to_json_line().unwrap();
    let b = verify_matrix(&traj, &REF, 1).unwrap().to_json_line().unwrap();
    assert_eq!(a, b);
}

/// Independent one-dimensional assembly of `F` and `Q` from `f′`, `f″`, `e`.
fn independent_fq(fp: f64, fpp: f64, e: f64, q: &Quintuple, p: f64, t: f64) -> (f64, f64) {
    let Quintuple { a, b, c, d, theta } = *q;
    let f = t * ((theta + a) * fpp + (b + c) * fp * fp + d * e);
    let grad = fp * fp;
    let qv = (p - 1.0) * e * f / t
        + (p - 1.0) * (b + (p - 1.0) * theta) * e * grad
        + (p - 1.0) * (c + a * (p - 1.0) - d * p) * e * grad
        + 2.0 * (theta - b) * fpp * fpp
        + 2.0 * (a - c) * fpp * fpp;
    (f, qv)
}

#[test]
fn dual_path_assembly_agrees() {
    let traj = concave_run(0.005);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let p = traj.p;
    for _ in 0..100 {
        let k = rng.gen_range(1..traj.snapshots.len());
        let u = &traj.snapshots[k];
        let d = derive(u).unwrap();
        let i = rng.gen_range(0..d.len());
        let f = crate::fields::f_tensor_at(&d, i, &REF, p, u.time);
        let qm = crate::fields::q_tensor_at(&d, i, f, &REF, p, u.time);
        let e = u.values[i].powf(p - 1.0);
        let (f_ind, q_ind) = independent_fq(d.grad[0][i], d.hess.at(i).xx, e, &REF, p, u.time);
        assert!((f.xx - f_ind).abs() <= 1e-10 * f_ind.abs().max(1.0));
        assert!((qm.xx - q_ind).abs() <= 1e-10 * q_ind.abs().max(1.0));
    }
}

#[test]
fn psi_vanishes_for_harn_on_space_constant_solution() {
    let traj = space_constant(1, 1.2, 2.0, &[0.0, 0.1, 0.2, 0.3]);
    let query = PathQuery::new(vec![3], vec![3], 0.1, 0.3, Variant::Harn);
    assert_eq!(psi_path(&traj, &query, &CPRIME, 1).unwrap(), 0.0);
    let report = verify_harnack_pair(&traj, &query, &CPRIME, 1).unwrap();
    // log u increases in t, so the margin is positive.
    assert!(report.pass && report.min_margin > 0.0);
    assert!(report.notes.iter().any(|n| n.contains("1 + G")));
}

#[test]
fn psi_harn3_matches_quadrature_on_space_constant_solution() {
    let (p, blowup, t1, t2) = (1.2, 2.0, 0.2, 0.6);
    let layers = 256;
    // Snapshots at the edge mid-times so the midpoint rule sees exact values.
    let mut times = vec![0.0, t1];
    times.extend((0..layers).rev().map(|j| {
        let s = (j as f64 + 0.5) / layers as f64;
        (1.0 - s) * t2 + s * t1
    }));
    times.push(t2);
    let traj = space_constant(1, p, blowup, &times);
    let mut query = PathQuery::new(vec![5], vec![5], t1, t2, Variant::Harn3);
    query.layers = layers;
    query.midpoint = true;
    let psi = psi_path(&traj, &query, &REF, 1).unwrap();
    // u^{p−1} = 1/((p−1)(T−τ)) integrates in closed form along τ = (1−s)t2 + s t1.
    let integral = ((blowup - t1) / (blowup - t2)).ln() / ((p - 1.0) * (t2 - t1));
    let want = -(4.0 / 8.0) * integral;
    assert!((psi - want).abs() < 1e-6, "{psi} vs {want}");
}

#[test]
fn psi_refinement_is_stable_on_smooth_run() {
    let traj = sine_run(256, 0.4, 1e-3, 10, 1.2);
    let times = traj.times();
    let mut query = PathQuery::new(vec![10], vec![40], times[10], times[40], Variant::Harn3);
    query.layers = 16;
    query.radius = 8;
    let coarse = psi_path(&traj, &query, &REF, 1).unwrap();
    let fine = psi_path(&traj, &query.refined(), &REF, 1).unwrap();
    assert!((fine - coarse).abs() <= 0.01 * coarse.abs(), "{coarse} {fine}");
}

#[test]
fn harnack_query_errors() {
    let traj = space_constant(1, 1.2, 2.0, &[0.0, 0.1, 0.2]);
    let backwards = PathQuery::new(vec![0], vec![0], 0.2, 0.1, Variant::Harn3);
    assert!(matches!(verify_harnack_pair(&traj, &backwards, &REF, 1), Err(Error::InvalidInput(_))));

    let off_grid = PathQuery::new(vec![0], vec![0], 0.1, 0.15, Variant::Harn3);
    assert!(matches!(psi_path(&traj, &off_grid, &REF, 1), Err(Error::InvalidInput(_))));

    let not_cprime = PathQuery::new(vec![0], vec![0], 0.1, 0.2, Variant::Harn);
    let err = verify_harnack_pair(&traj, &not_cprime, &REF, 1).unwrap_err();
    assert!(err.to_string().contains("a=d and b-a+c<0"), "{err}");

    let mut stuck = PathQuery::new(vec![0], vec![4], 0.1, 0.2, Variant::Harn3);
    stuck.radius = 0;
    assert!(matches!(psi_path(&traj, &stuck, &REF, 1), Err(Error::Config(_))));
    stuck.radius = 1;
    stuck.layers = 2;
    assert!(matches!(psi_path(&traj, &stuck, &REF, 1), Err(Error::Config(_))));
}

#[test]
fn random_queries_are_seeded() {
    let traj = space_constant(2, 1.2, 2.0, &[0.0, 0.1, 0.2, 0.3]);
    let a = random_queries(&traj, 20, Variant::Harn2, 7).unwrap();
    assert_eq!(a, random_queries(&traj, 20, Variant::Harn2, 7).unwrap());
    assert_ne!(a, random_queries(&traj, 20, Variant::Harn2, 8).unwrap());
    for q in &a {
        assert!(q.t1 > 0.0 && q.t1 < q.t2);
        assert_eq!(q.x1.len(), 2);
    }
}

#[test]
fn harn3_report_flags_verbatim_potential() {
    let traj = sine_run(32, 0.2, 1e-3, 10, 1.2);
    let times = traj.times();
    let query = PathQuery::new(vec![3], vec![9], times[5], times[15], Variant::Harn3);
    let report = verify_harnack_pair(&traj, &query, &REF, 1).unwrap();
    assert!(report.details.contains_key("margin_time_scaled"));
    assert!(report.notes.iter().any(|n| n.contains("no (t2-t1) factor")));
    let alt = report.details["alt_margin"].as_f64().unwrap();
    // 1/(aε) < 1/ε for a > 1 and t2 > t1.
    assert!(alt < report.min_margin);
}
