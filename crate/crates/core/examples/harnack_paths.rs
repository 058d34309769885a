//! Path-integrated Harnack margins on the standard T¹ run for the three
//! variants, and how the discrete ψ responds to refining the layered graph.

use std::f64::consts::PI;

use harnack_lab::solver::{solve_with, SolveOptions};
use harnack_lab::verifier::{psi_path, random_queries, verify_harnack_batch, Variant, VerifyOptions};
use harnack_lab::{Grid, Quintuple, ScalarField};

fn main() -> harnack_lab::Result<()> {
    let grid = Grid::unit(1, 256)?;
    let u0 = ScalarField::from_fn(grid, 0.0, |x| 1.0 + 0.5 * (2.0 * PI * x[0]).sin())?;
    let traj = solve_with(&u0, 1.0, 1e-4, 1.2, &SolveOptions { stride: 10, ..Default::default() })?;
    let reference = Quintuple::new(4.0, 3.0, 1.0, 4.0, 4.0);
    let cprime = Quintuple::new(9.22063, 4.0, 1.0, 9.22063, 5.0);

    for (variant, q) in [(Variant::Harn, cprime), (Variant::Harn2, cprime), (Variant::Harn3, reference)] {
        let queries = random_queries(&traj, 50, variant, 2024)?;
        let reports = verify_harnack_batch(&traj, &queries, &q, 1, &VerifyOptions::default())?;
        let worst = reports.iter().min_by(|a, b| a.min_margin.total_cmp(&b.min_margin)).unwrap();
        let failing = reports.iter().filter(|r| !r.pass).count();
        println!(
            "{variant}: {failing}/50 fail, worst margin {:.4} (t1={}, t2={}, psi={})",
            worst.min_margin, worst.details["t1"], worst.details["t2"], worst.details["psi"]
        );
        if let Some(scaled) = worst.details.get("margin_time_scaled") {
            println!("       same query with a time-scaled potential: {scaled}");
        }

        let query = &queries[0];
        let mut row = format!("       psi for {:?}->{:?}:", query.x2, query.x1);
        let mut refined = query.clone();
        for _ in 0..3 {
            row.push_str(&format!(" (S={}, R={}) {:.5}", refined.layers, refined.radius, psi_path(&traj, &refined, &q, 1)?));
            refined = refined.refined();
        }
        println!("{row}");
    }
    Ok(())
}
