//! Constant tensors: metrics, the ε-tensor, the 3d R̂-matrix and the 4d
//! projector decomposition with the two R-matrices built from it.

use qminkowski::qnum::DeformationParams;
use qminkowski::tensors::{
    build_rmatrix4, projector_identity_residual, rhat3_eigenvalues, RMatrixVariant, Tensors, COMPONENT_LABELS,
};
use qminkowski::Result;

pub fn run_example() -> Result<()> {
    let p = DeformationParams::new(1.1)?;
    let t = Tensors::new(&p);
    println!("component order: {:?}", COMPONENT_LABELS);
    println!("g_AB = {:?}", t.g.lower);
    println!("eta_ab = {:?}", t.eta.eta);

    let mut ev: Vec<f64> = rhat3_eigenvalues(&p).iter().map(|z| z.re).collect();
    ev.sort_by(f64::total_cmp);
    println!("eigenvalues of the 3d R-hat: {ev:.6?}");
    println!("3d braid relation residual: {:.2e}", t.rhat3.braid_residual());

    println!(
        "projector identities residual: {:.2e}",
        projector_identity_residual(&t.proj)
    );
    for (name, pr) in [
        ("P+", &t.proj.plus),
        ("P-", &t.proj.minus),
        ("PT", &t.proj.trace),
        ("PS", &t.proj.symmetric),
    ] {
        println!("rank of {name} (trace): {:.6}", pr.trace());
    }
    for v in [RMatrixVariant::I, RMatrixVariant::II] {
        let r = build_rmatrix4(v, &t.proj, &p);
        println!("R_{v:?}: braid residual {:.2e}", r.braid_residual());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
