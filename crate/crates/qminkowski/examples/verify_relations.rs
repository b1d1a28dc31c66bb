//! Runs the full relation catalog on a small window of every sector.

use qminkowski::hilbert::{SectorKind, TruncationWindow};
use qminkowski::verify::{build_sector, evaluate_catalog, relation_catalog, VerifyOptions};
use qminkowski::Result;

pub fn run_example() -> Result<()> {
    for kind in [
        SectorKind::SpaceLike,
        SectorKind::TimeLikeForward,
        SectorKind::TimeLikeBackward,
        SectorKind::LightLike,
    ] {
        let window = if kind.is_time_like() {
            TruncationWindow::new(3, (0, 7), (-2, 2), 0)?
        } else {
            TruncationWindow::new(3, (-4, 4), (-2, 2), 0)?
        };
        let set = build_sector(1.1, kind, 1.0, window)?;
        let catalog = relation_catalog(&set.params);
        let report = evaluate_catalog(&catalog, &set, VerifyOptions::default())?;
        let worst = report
            .reports
            .iter()
            .max_by(|a, b| a.normalized.total_cmp(&b.normalized));
        println!(
            "{kind}: dim {}, {} relations checked, {} not representable, all pass: {}, worst {}",
            set.basis.dim(),
            report.reports.len(),
            report.skipped.len(),
            report.all_pass(),
            worst
                .map(|w| format!("{} ({:.2e})", w.name, w.normalized))
                .unwrap_or_default()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
