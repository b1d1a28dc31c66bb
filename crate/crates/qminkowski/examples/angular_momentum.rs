//! The SU_q(2) generators derived from the Lorentz generators: the Casimir
//! equals [j][j+1] and τ equals q^{-4m} on every interior state.

use qminkowski::hilbert::{SectorKind, TruncationWindow};
use qminkowski::verify::{build_sector, casimir_expr, Environment};
use qminkowski::Result;

pub fn run_example() -> Result<()> {
    for kind in [
        SectorKind::SpaceLike,
        SectorKind::TimeLikeBackward,
        SectorKind::LightLike,
    ] {
        let window = match kind {
            SectorKind::SpaceLike => TruncationWindow::new(3, (-4, 4), (0, 0), 0)?,
            SectorKind::LightLike => TruncationWindow::new(3, (-4, 4), (0, 0), 0)?,
            _ => TruncationWindow::new(3, (0, 6), (0, 0), 0)?,
        };
        let set = build_sector(1.1, kind, 1.0, window)?;
        let env = Environment::new(&set);
        let casimir = casimir_expr(&set.params);
        let (_, halo) = casimir.budget(&env)?;
        let c = casimir.evaluate(&env)?;
        let p = set.params;
        let (mut dev_c, mut dev_tau): (f64, f64) = (0.0, 0.0);
        let interior = set.basis.interior_indices(halo);
        for &i in &interior {
            let l = set.basis.label(i);
            dev_c = dev_c.max((c.get(i, i).re - p.br(l.j) * p.br(l.j + 1)).abs());
            dev_tau = dev_tau.max((set.su.tau.get(i, i).re - p.powi(-4 * l.m)).abs());
        }
        println!(
            "{kind}: {} interior states, |T^2 - [j][j+1]| <= {dev_c:.2e}, |tau - q^(-4m)| <= {dev_tau:.2e}",
            interior.len()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
