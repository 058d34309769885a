//! log-derivatives of a T² snapshot and the Harnack tensor F, exported in
//! the snapshot file format.
//!
//! ```text
//! cargo run --example derived_fields [out_file]
//! ```

use std::f64::consts::PI;

use harnack_lab::fields::{derive, f_tensor, q_tensor};
use harnack_lab::params::{k_of_n, ConeFamilyPoint};
use harnack_lab::{Grid, ScalarField};

fn main() -> harnack_lab::Result<()> {
    let grid = Grid::unit(2, 64)?;
    let u = ScalarField::from_fn(grid, 0.25, |x| {
        1.0 + 0.4 * (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).cos()
    })?;
    let d = derive(&u)?;
    let max = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    println!("max |∇f|² = {:.6}", max(&d.grad_sq));
    println!("max ρ     = {:.6}", max(&d.rho));
    println!("max ρ̊     = {:.6}", max(&d.rho_ring));

    let q = ConeFamilyPoint::at_maximiser(2, k_of_n(2)?, 1.0)?.quintuple();
    let p = 1.1;
    let f = f_tensor(&d, &q, p, u.time)?;
    let qt = q_tensor(&d, &f, &q, p, u.time)?;
    let lowest = (0..f.len()).map(|i| f.at(i).min_eigenvalue()).fold(f64::INFINITY, f64::min);
    let negative = (0..f.len()).filter(|&i| f.at(i).max_eigenvalue() <= 0.0).count();
    println!("quintuple {q}: min λ_min(F) = {lowest:.6}, points with F ⪯ 0: {negative}");
    println!("Q at the origin: {:?}", qt.at(0));

    if let Some(path) = std::env::args().nth(1) {
        f.to_snapshot(p).write(path.as_ref())?;
        println!("wrote F to {path}");
    }
    Ok(())
}
