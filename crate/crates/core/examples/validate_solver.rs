//! Solver against exact solutions: heat mode decay, the space-constant
//! semilinear solution and the ODE blow-up time.

use harnack_lab::solver::validation::{blowup_guard, heat_exact, space_constant_exact, standard_checks};

fn main() -> harnack_lab::Result<()> {
    for check in standard_checks()? {
        println!(
            "{:<22} error {:.3e}  tolerance {:.0e}  {}  ({})",
            check.name,
            check.error,
            check.tolerance,
            if check.pass { "pass" } else { "FAIL" },
            check.detail
        );
    }

    println!("\nheat-only error against dt (N=256, t=0.1):");
    for dt in [1e-4, 1e-5, 1e-6] {
        println!("  dt={dt:.0e}  {:.3e}", heat_exact(256, dt, 0.1, 1.0)?.error);
    }
    println!("space-constant relative error against dt (T=2, p=1.5):");
    for dt in [1e-3, 1e-4, 1e-5] {
        println!("  dt={dt:.0e}  {:.3e}", space_constant_exact(2.0, 1.5, dt, 1.0)?.error);
    }
    println!("guard trip against dt (m0=0.5, p=1.2):");
    for dt in [1e-1, 1e-2, 1e-3] {
        println!("  dt={dt:.0e}  {}", blowup_guard(0.5, 1.2, dt, 0.1)?.detail);
    }
    Ok(())
}
