//! Threshold constants of the canonical family for n = 1..10.
//!
//! ```text
//! cargo run --example cone_table [n_max]
//! ```

use harnack_lab::params::cone_table_csv;

fn main() -> harnack_lab::Result<()> {
    let n_max = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    print!("{}", cone_table_csv(1, n_max)?);
    Ok(())
}
