//! On the light cone the two equations that fix P⁰ have a singular matrix but
//! a nonzero inhomogeneity, so momenta cannot be represented there.

use qminkowski::hilbert::{SectorKind, TruncationWindow};
use qminkowski::verify::{build_sector, lightcone_obstruction};
use qminkowski::Result;

pub fn run_example() -> Result<()> {
    for q in [1.1, 1.5] {
        let set = build_sector(
            q,
            SectorKind::LightLike,
            1.0,
            TruncationWindow::new(3, (-6, 6), (0, 0), 0)?,
        )?;
        let rep = lightcone_obstruction(&set)?;
        println!(
            "q = {q}: {} elements, sigma ratio <= {:.2e}, inhomogeneity >= {:.5} (U element {:.5})",
            rep.points.len(),
            rep.max_singular_ratio,
            rep.min_inhomogeneity,
            rep.points[0].u_element
        );
        println!("  verdict: {}", rep.verdict);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
