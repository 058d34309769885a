//! Seeded search of the canonical family for the largest exponent bound G,
//! compared with the value G~(n) on the maximiser curve.
//!
//! ```text
//! cargo run --example cone_search [budget] [seed]
//! ```

use harnack_lab::params::{g_tilde, maximize_g};

fn main() -> harnack_lab::Result<()> {
    let mut args = std::env::args().skip(1);
    let budget = args.next().and_then(|s| s.parse().ok()).unwrap_or(512);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    for n in 1..=6 {
        let (q, g) = maximize_g(n, budget, seed)?;
        println!("n={n}: G={g:.9} (G~={:.9}) at {q}", g_tilde(n)?);
    }
    Ok(())
}
