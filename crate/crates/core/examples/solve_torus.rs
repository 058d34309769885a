//! Integrate u_t = Δu + u^p on T¹ from 1 + 0.5 sin 2πx and store the
//! trajectory.
//!
//! ```text
//! cargo run --release --example solve_torus [out_dir]
//! ```

use std::f64::consts::PI;
use std::path::PathBuf;

use harnack_lab::solver::io::write_trajectory;
use harnack_lab::solver::{solve_with, SolveOptions};
use harnack_lab::{Grid, ScalarField};

fn main() -> harnack_lab::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from);
    let grid = Grid::unit(1, 256)?;
    let u0 = ScalarField::from_fn(grid, 0.0, |x| 1.0 + 0.5 * (2.0 * PI * x[0]).sin())?;
    let traj = solve_with(&u0, 1.0, 1e-4, 1.2, &SolveOptions { stride: 100, ..Default::default() })?;

    println!("status {:?}, {} snapshots", traj.status, traj.snapshots.len());
    for u in &traj.snapshots {
        println!("t={:.2}  min={:.6}  max={:.6}  mean={:.6}", u.time, u.min(), u.max(), u.mean());
    }
    println!("guard distance log10(cap/peak) = {:.3}", traj.guard_distance());
    if let Some(dir) = out {
        let index = write_trajectory(&traj, &dir)?;
        println!("wrote {}", index.display());
    }
    Ok(())
}
