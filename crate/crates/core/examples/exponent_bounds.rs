//! Admissibility margins and exponent bounds for a few quintuples.

use harnack_lab::params::{cprime_member, g1, g2, g_bound, is_admissible};
use harnack_lab::Quintuple;

fn main() -> harnack_lab::Result<()> {
    let samples = [
        (1, Quintuple::new(4.0, 3.0, 1.0, 4.0, 4.0)),
        (1, Quintuple::new(9.22063, 4.0, 1.0, 9.22063, 5.0)),
        (1, Quintuple::new(6.0, 3.0, 1.0, 6.0, 4.0)),
        (2, Quintuple::new(3.73205, 4.09808, 1.0, 3.73205, 5.09808)),
        (1, Quintuple::new(2.0, 3.0, 1.0, 4.0, 4.0)),
    ];
    println!("{:<44} {:>2} {:>6} {:>7} {:>10} {:>10} {:>10}", "quintuple", "n", "member", "C'", "G1", "G2", "G");
    for (n, q) in samples {
        let report = is_admissible(&q, n, q.default_tolerance())?;
        let bounds = g1(q.b, q.d, q.theta).and_then(|a| Ok((a, g2(&q)?, g_bound(&q)?)));
        let (a, b, g) = match bounds {
            Ok(v) => v,
            Err(e) => {
                println!("{:<44} {n:>2} {:>6}  bounds undefined: {e}", q.to_string(), report.member);
                continue;
            }
        };
        println!(
            "{:<44} {n:>2} {:>6} {:>7} {a:>10.6} {b:>10.6} {g:>10.6}",
            q.to_string(),
            report.member,
            cprime_member(&q, n)?
        );
        if !report.member {
            println!("    margins (ordering, exponent, quartic) = {:?}", report.margins());
        }
    }
    Ok(())
}
