//! Basis enumeration and the (t, r) lattices of every sector, including the
//! adjacency condition between neighbouring points.

use qminkowski::hilbert::{
    check_spectral_condition, enumerate_basis, spectrum_points, Sector, SectorKind, TruncationWindow,
};
use qminkowski::qnum::DeformationParams;
use qminkowski::Result;

pub fn run_example() -> Result<()> {
    let p = DeformationParams::new(1.1)?;
    for kind in [
        SectorKind::SpaceLike,
        SectorKind::TimeLikeForward,
        SectorKind::TimeLikeBackward,
        SectorKind::LightLike,
    ] {
        let sector = Sector::new(kind, 1.0, &p)?;
        let window = TruncationWindow::default_for(kind);
        let basis = enumerate_basis(sector, window)?;
        println!("{kind}: window {window:?}, dimension {}", basis.dim());
        println!(
            "  first states: {} {} {}",
            basis.label(0),
            basis.label(1),
            basis.label(2)
        );

        let pts = spectrum_points(sector, &p, (window.n_lo, window.n_hi), (0, 0))?;
        let s2 = sector.invariant_length(0, &p);
        let mut worst: f64 = 0.0;
        for w in pts.windows(2) {
            // Each point must be a neighbour of the next one on the same hyperboloid.
            worst = worst.max(check_spectral_condition(w[1].t, w[0].t, w[0].r, s2, &p));
        }
        let (t0, r0) = (pts[0].t, pts[0].r);
        println!(
            "  M = 0: {} points, first (t, r) = ({t0:.6}, {r0:.6}), adjacency residual {worst:.2e}",
            pts.len()
        );
    }

    let sector = Sector::new(SectorKind::TimeLikeForward, 1.0, &p)?;
    let pts = spectrum_points(sector, &p, (40, 40), (0, 0))?;
    println!(
        "time-like n = 40: t/r - 1 = {:.3e} (the lattice hugs the light cone)",
        pts[0].t / pts[0].r - 1.0
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
