//! Matrix, trace and claim certification on the standard T¹ run, plus the
//! scale covariance of the verdict.

use std::f64::consts::PI;

use harnack_lab::solver::{solve_with, SolveOptions};
use harnack_lab::verifier::{verify_claim, verify_matrix, verify_trace};
use harnack_lab::{Grid, Quintuple, ScalarField};

fn main() -> harnack_lab::Result<()> {
    let grid = Grid::unit(1, 256)?;
    let u0 = ScalarField::from_fn(grid, 0.0, |x| 1.0 + 0.5 * (2.0 * PI * x[0]).sin())?;
    let traj = solve_with(&u0, 1.0, 1e-4, 1.2, &SolveOptions { stride: 10, ..Default::default() })?;
    let q = Quintuple::new(4.0, 3.0, 1.0, 4.0, 4.0);

    for report in [verify_matrix(&traj, &q, 1)?, verify_trace(&traj, &q, 1)?, verify_claim(&traj, &q, 1)?] {
        println!("{}", report.to_json_line()?);
    }
    for lambda in [0.5, 2.0] {
        let r = verify_matrix(&traj, &q.scaled(lambda), 1)?;
        println!("scaled by {lambda}: min margin {:.6}, pass {}", r.min_margin, r.pass);
    }
    match verify_matrix(&solve_with(&u0, 0.1, 1e-4, 1.5, &SolveOptions::default())?, &q, 1) {
        Err(e) => println!("p = 1.5 rejected: {e}"),
        Ok(_) => println!("p = 1.5 unexpectedly accepted"),
    }
    Ok(())
}
