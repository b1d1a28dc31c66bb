//! Builds every generator on one sector and prints sizes and shift signatures.

use qminkowski::hilbert::{SectorKind, TruncationWindow};
use qminkowski::verify::build_sector;
use qminkowski::Result;

pub fn run_example() -> Result<()> {
    let window = TruncationWindow::new(3, (0, 8), (-2, 2), 0)?;
    let set = build_sector(1.1, SectorKind::TimeLikeForward, 1.0, window)?;
    set.audit_signatures()?;
    println!("time-like forward sector, q = 1.1, dimension {}", set.basis.dim());
    println!("{:<10} {:>8} {:>12}  halo", "operator", "nnz", "max |elem|");
    for o in set.named_operators() {
        println!("{:<10} {:>8} {:>12.5}  {:?}", o.name(), o.nnz(), o.max_abs(), o.halo());
    }
    let x3 = set.operator("X3")?;
    let i = set
        .basis
        .index_of(&qminkowski::hilbert::BasisLabel::new(1, 0, 3, 0))
        .expect("state in window");
    println!("column of X3 on {}:", set.basis.label(i));
    for (r, c, v) in x3.iter().filter(|&(_, c, _)| c == i) {
        println!("  <{}|X3|{}> = {:.12}", set.basis.label(r), set.basis.label(c), v.re);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
