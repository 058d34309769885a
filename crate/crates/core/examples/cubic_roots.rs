//! Trigonometric and hyperbolic roots of depressed cubics, and the positive
//! roots of the family cubic H(z, k, n) just above the threshold k(n).

use harnack_lab::params::{depressed_cubic_roots, h_poly, h_positive_roots, k_of_n, z_of_kn};

fn main() -> harnack_lab::Result<()> {
    for (p, q) in [(-7.0, 6.0), (-3.0, 2.0), (1.0, 1.0), (-1.0, 5.0), (0.0, -8.0)] {
        let roots = depressed_cubic_roots(p, q);
        let worst = roots.iter().map(|x| (x * x * x + p * x + q).abs()).fold(0.0, f64::max);
        println!("x^3 + ({p})x + ({q}): roots {roots:?}, max residual {worst:.1e}");
    }
    println!();
    for n in 1..=4 {
        let k = k_of_n(n)? + 0.5;
        let z = z_of_kn(k, n)?;
        match h_positive_roots(k, n) {
            Some((z1, z2)) => println!(
                "n={n}, k={k:.6}: H > 0 on ({z1:.6}, {z2:.6}); maximiser z={z:.6}, H(z)={:.6}",
                h_poly(z, k, n)
            ),
            None => println!("n={n}, k={k:.6}: H has no positive interval"),
        }
    }
    Ok(())
}
