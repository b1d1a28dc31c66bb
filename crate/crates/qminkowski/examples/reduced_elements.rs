//! Reduced coordinate elements: the closed tables against the route through
//! ρ, and the two forms of ρ against each other.

use qminkowski::hilbert::{Sector, SectorKind};
use qminkowski::operators::{rho, rho_partial_sum, x_reduced_closed, x_reduced_rho, ReducedKey};
use qminkowski::qnum::DeformationParams;
use qminkowski::Result;

pub fn run_example() -> Result<()> {
    for q in [1.1, 1.5] {
        let p = DeformationParams::new(q)?;
        for kind in [
            SectorKind::SpaceLike,
            SectorKind::TimeLikeForward,
            SectorKind::TimeLikeBackward,
        ] {
            let sector = Sector::new(kind, 1.0, &p)?;
            let ns: Vec<i64> = if kind.is_time_like() {
                (0..=10).collect()
            } else {
                (-8..=8).collect()
            };
            let (mut table_dev, mut rho_dev): (f64, f64) = (0.0, 0.0);
            for &n in &ns {
                for level in -2..=2 {
                    for j in 0..=5 {
                        if !sector.admissible(j, n) {
                            continue;
                        }
                        for jp in (j - 1).max(0)..=j + 1 {
                            if !sector.admissible(jp, n) {
                                continue;
                            }
                            let k = ReducedKey {
                                jp,
                                np: n,
                                levelp: level,
                                j,
                                n,
                                level,
                            };
                            let a = x_reduced_closed(&sector, &p, &k)?;
                            let b = x_reduced_rho(&sector, &p, &k);
                            table_dev = table_dev.max((a - b).abs() / (1.0 + a.abs()));
                        }
                        let jj = j + 1;
                        rho_dev = rho_dev
                            .max((rho(&sector, &p, n, level, jj) - rho_partial_sum(&sector, &p, n, level, jj)).abs());
                    }
                }
            }
            println!("q = {q}, {kind}: closed vs rho route {table_dev:.2e}, rho vs partial sum {rho_dev:.2e}");
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
