//! The pointwise claim θ²Q ⪰ F²/(εt²) on the early transient of
//! 0.5·exp(−cos 2πx), where log u is strongly concave and F ⪯ 0 somewhere.

use std::f64::consts::PI;

use harnack_lab::fields::derive;
use harnack_lab::solver::{solve_with, SolveOptions};
use harnack_lab::verifier::{claim_margin_at, eps_of, verify_claim, CLAIM_THRESHOLD};
use harnack_lab::{Grid, Quintuple, ScalarField};

fn main() -> harnack_lab::Result<()> {
    let grid = Grid::unit(1, 256)?;
    let u0 = ScalarField::from_fn(grid, 0.0, |x| 0.5 * (-(2.0 * PI * x[0]).cos()).exp())?;
    let traj = solve_with(&u0, 0.02, 1e-4, 1.1, &SolveOptions::default())?;
    let q = Quintuple::new(4.0, 3.0, 1.0, 4.0, 4.0);
    let eps = eps_of(&q)?;

    println!("{}", verify_claim(&traj, &q, 1)?.to_json_line()?);
    println!("\n    t    points with F ⪯ 0    min claim margin");
    for u in traj.snapshots.iter().skip(1).step_by(20) {
        let d = derive(u)?;
        let margins: Vec<f64> = (0..d.len())
            .filter_map(|i| claim_margin_at(&d, i, &q, traj.p, u.time, eps, CLAIM_THRESHOLD))
            .collect();
        let worst = margins.iter().cloned().fold(f64::INFINITY, f64::min);
        println!("{:6.4} {:>18} {:>19.4}", u.time, margins.len(), worst);
    }
    Ok(())
}
