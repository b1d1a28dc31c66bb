//! Property tests for q-numbers, sparse operators and spectra.

use num_complex::Complex64;
use proptest::prelude::*;
use qminkowski::hilbert::{Sector, SectorKind};
use qminkowski::qnum::{sum_identity, DeformationParams};
use qminkowski::sparse::{ShiftSignature, SparseOperator};

fn any_op(dim: usize) -> impl Strategy<Value = SparseOperator> {
    prop::collection::vec((0..dim, 0..dim, -3.0..3.0f64, -3.0..3.0f64), 0..40).prop_map(move |t| {
        let trip = t.into_iter().map(|(r, c, a, b)| (r, c, Complex64::new(a, b))).collect();
        SparseOperator::from_triplets("A", dim, trip, ShiftSignature::diagonal())
    })
}

fn dense_mul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|k| (0..n).map(|j| a[i][j] * b[j][k]).sum()).collect())
        .collect()
}

proptest! {
    #[test]
    fn bracket_is_odd_and_curly_even(q in 1.001..3.0f64, a in -20.0..20.0f64) {
        let p = DeformationParams::new(q).unwrap();
        let scale = p.bracket(a.abs()).abs().max(1.0);
        prop_assert!((p.bracket(-a) + p.bracket(a)).abs() <= 1e-12 * scale);
        prop_assert!((p.curly(-a) - p.curly(a)).abs() <= 1e-12 * p.curly(a));
    }

    #[test]
    fn bracket_times_curly_doubles(q in 1.001..2.0f64, a in -10.0..10.0f64) {
        let p = DeformationParams::new(q).unwrap();
        let lhs = p.bracket(a) * p.curly(a);
        let rhs = p.bracket(2.0 * a);
        prop_assert!((lhs - rhs).abs() <= 1e-11 * rhs.abs().max(1.0));
    }

    #[test]
    fn sum_identity_holds(q in 1.01..2.0f64, j in 1u32..=30) {
        let p = DeformationParams::new(q).unwrap();
        let (l, r) = sum_identity(j, &p).unwrap();
        prop_assert!((l - r).abs() <= 1e-12 * r.abs().max(1.0));
    }

    #[test]
    fn adjoint_is_an_involution(a in any_op(7)) {
        let b = a.adjoint().adjoint();
        for (r, c, v) in a.iter() {
            prop_assert_eq!(b.get(r, c), v);
        }
        prop_assert_eq!(a.nnz(), b.nnz());
    }

    #[test]
    fn matmul_matches_dense(a in any_op(6), b in any_op(6)) {
        let sparse = a.matmul(&b).unwrap().to_dense();
        let dense = dense_mul(&a.to_dense(), &b.to_dense());
        for i in 0..6 {
            for k in 0..6 {
                prop_assert!((sparse[i][k] - dense[i][k]).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn adjoint_reverses_products(a in any_op(5), b in any_op(5)) {
        let lhs = a.matmul(&b).unwrap().adjoint().to_dense();
        let rhs = b.adjoint().matmul(&a.adjoint()).unwrap().to_dense();
        for i in 0..5 {
            for k in 0..5 {
                prop_assert!((lhs[i][k] - rhs[i][k]).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn lattice_points_lie_on_their_hyperboloid(q in 1.01..1.6f64, n in 0i64..15, level in -3i64..=3) {
        let p = DeformationParams::new(q).unwrap();
        for kind in [SectorKind::TimeLikeForward, SectorKind::TimeLikeBackward, SectorKind::SpaceLike] {
            let s = Sector::new(kind, 1.0, &p).unwrap();
            let (t, r2) = s.point(n, level, &p);
            let s2 = s.invariant_length(level, &p);
            prop_assert!((t * t - r2 - s2).abs() <= 1e-12 * (t * t).max(1.0));
            prop_assert!(r2 >= -1e-12);
        }
    }
}

#[test]
fn forward_and_space_like_time_spectra_are_disjoint() {
    let p = DeformationParams::new(1.1).unwrap();
    let fwd = Sector::new(SectorKind::TimeLikeForward, 1.0, &p).unwrap();
    let spc = Sector::new(SectorKind::SpaceLike, 1.0, &p).unwrap();
    let tf: Vec<f64> = (0..=12)
        .flat_map(|n| (-4..=4).map(move |m| (n, m)))
        .map(|(n, m)| fwd.point(n, m, &p).0)
        .collect();
    let ts: Vec<f64> = (-8..=8)
        .flat_map(|n| (-4..=4).map(move |m| (n, m)))
        .map(|(n, m)| spc.point(n, m, &p).0)
        .collect();
    for a in &tf {
        for b in &ts {
            assert!((a - b).abs() > 1e-12, "shared X0 eigenvalue {a}");
        }
    }
}

fn light_cone_report(phases: Vec<f64>) -> (qminkowski::verify::CatalogReport, bool) {
    use qminkowski::hilbert::TruncationWindow;
    use qminkowski::operators::{BuildOptions, OperatorSet};
    use qminkowski::verify::{evaluate_catalog, relation_catalog, VerifyOptions};

    let p = DeformationParams::new(1.1).unwrap();
    let sector = Sector::new(SectorKind::LightLike, 1.0, &p).unwrap();
    let window = TruncationWindow::new(3, (-4, 4), (0, 0), 0).unwrap();
    let set = OperatorSet::build(&p, sector, window, &BuildOptions { light_phases: phases }).unwrap();
    let complex = set.lam_half.iter().any(|(_, _, v)| v.im.abs() > 1e-3);
    (
        evaluate_catalog(&relation_catalog(&p), &set, VerifyOptions::default()).unwrap(),
        complex,
    )
}

#[test]
fn constant_light_cone_phase_leaves_the_catalog_intact() {
    let (report, complex) = light_cone_report(vec![0.8; 9]);
    assert!(complex);
    let failing: Vec<_> = report.failures().iter().map(|r| r.name.clone()).collect();
    assert!(report.all_pass(), "failing with a constant phase: {failing:?}");
}

#[test]
fn varying_light_cone_phases_keep_conjugation_but_break_commutation_with_u() {
    let (report, complex) = light_cone_report((0..9).map(|k| 0.3 + 0.71 * k as f64).collect());
    assert!(complex);
    let get = |n: &str| report.reports.iter().find(|r| r.name == n).unwrap();
    assert!(get("conj-Lambda").pass);
    // Λ^{1/2} shifts n with phase e^{iα_n} while U links n and n+1 with
    // real elements; the two commute only if α_{n+1} = α_n.
    assert!(!get("Lambda-U").pass);
}
