//! As q → 1 the coordinates commute: the normalised commutator shrinks
//! linearly in q − 1.

use qminkowski::verify::q_limit_probe;
use qminkowski::Result;

pub fn run_example() -> Result<()> {
    let rows = q_limit_probe(&[1.1, 1.01, 1.001])?;
    for r in &rows {
        println!(
            "q = {:<6} max |[X^A, X^B]| = {:.3e}, normalised {:.3e}",
            r.q, r.commutator, r.normalized
        );
    }
    println!(
        "ratio q = 1.01 vs 1.001: {:.3}",
        rows[1].normalized / rows[2].normalized
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
