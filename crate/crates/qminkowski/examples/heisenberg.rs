//! Momenta off the light cone: the X–P relations, and the P⁰ and X∘P elements
//! recovered by solving the two linear equations those relations impose.

use qminkowski::hilbert::{SectorKind, TruncationWindow};
use qminkowski::verify::{build_sector, evaluate_catalog, relation_catalog, solve_momentum_elements, VerifyOptions};
use qminkowski::Result;

pub fn run_example() -> Result<()> {
    for kind in [SectorKind::TimeLikeForward, SectorKind::SpaceLike] {
        let window = if kind.is_time_like() {
            TruncationWindow::new(2, (0, 7), (-2, 2), 0)?
        } else {
            TruncationWindow::new(2, (-4, 4), (-2, 2), 0)?
        };
        let set = build_sector(1.5, kind, 1.0, window)?;
        let catalog: Vec<_> = relation_catalog(&set.params)
            .into_iter()
            .filter(|s| s.involves_momenta())
            .collect();
        let report = evaluate_catalog(&catalog, &set, VerifyOptions::default())?;
        println!(
            "{kind}: {} momentum relations, every measurable one passes: {}, worst {:.2e}",
            report.reports.len(),
            report.reports.iter().all(|r| r.pass || r.inconclusive),
            report.worst(None, &catalog)
        );
        for r in report.reports.iter().filter(|r| r.inconclusive) {
            println!("  inconclusive on this window: {}", r.name);
        }
        let solved = solve_momentum_elements(&set)?;
        println!(
            "  solved {} pairs: |P0 - table| <= {:.2e}, |XoP - product| <= {:.2e} (P0 scale {:.2})",
            solved.pairs, solved.max_p0_deviation, solved.max_xop_deviation, solved.p0_scale
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
