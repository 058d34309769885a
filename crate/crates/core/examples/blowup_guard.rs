//! Growing solutions approach the blow-up cap; the matrix margin is tracked
//! against the distance to the guard.

use std::f64::consts::PI;

use harnack_lab::solver::{ode_blowup_time, solve_with, SolveOptions};
use harnack_lab::verifier::verify_matrix;
use harnack_lab::{Grid, Quintuple, ScalarField};

fn main() -> harnack_lab::Result<()> {
    let grid = Grid::unit(1, 128)?;
    let q = Quintuple::new(4.0, 3.0, 1.0, 4.0, 4.0);
    let p = 1.2;
    let u0 = ScalarField::from_fn(grid, 0.0, |x| 2.0 + 0.5 * (2.0 * PI * x[0]).cos())?;
    let horizon = ode_blowup_time(u0.min(), p)?;
    println!("ODE blow-up bounds: from max {:.4}, from min {horizon:.4}", ode_blowup_time(u0.max(), p)?);

    for fraction in [0.25, 0.5, 0.75, 0.85, 1.2] {
        let traj = solve_with(&u0, fraction * horizon, 1e-3, p, &SolveOptions { stride: 50, ..Default::default() })?;
        let report = verify_matrix(&traj, &q, 1)?;
        println!(
            "t_end={:7.4}  status={:?}  peak={:10.3e}  guard distance={:6.3}  min matrix margin={:.6}  at the last snapshot={}",
            traj.last().time,
            traj.status,
            traj.peak(),
            traj.guard_distance(),
            report.min_margin,
            report.details["final_snapshot_margin"]
        );
    }
    Ok(())
}
