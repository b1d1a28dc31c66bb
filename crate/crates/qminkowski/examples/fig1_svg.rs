//! Scatter plot of the admissible (r, t) values of the forward time-like and
//! the space-like sectors at q = 1.1, scale 1, written as SVG.

use qminkowski::cli::{cmd_spectrum, OutputFormat, RunConfig};
use qminkowski::hilbert::{SectorKind, TruncationWindow};
use qminkowski::Result;

pub fn run_example() -> Result<()> {
    let mut config = RunConfig::for_sector(SectorKind::TimeLikeForward);
    config.window = TruncationWindow::new(0, (-12, 12), (-4, 4), 0)?;
    config.format = OutputFormat::Svg;
    let svg = cmd_spectrum(&config, &[SectorKind::TimeLikeForward, SectorKind::SpaceLike])?;
    let path = std::env::temp_dir().join("qminkowski_fig1.svg");
    std::fs::write(&path, &svg)?;
    println!(
        "wrote {} ({} points, {} bytes)",
        path.display(),
        svg.matches("class=\"point\"").count(),
        svg.len()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
