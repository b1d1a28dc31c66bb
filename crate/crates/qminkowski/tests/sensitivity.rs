//! Each relation below passes in the form used by the catalog, while a nearby
//! variant (a flipped sign, a missing factor, other coefficients) fails.  The
//! checks are therefore sensitive to exactly these details.

use num_complex::Complex64;
use qminkowski::hilbert::{check_spectral_condition, Sector, SectorKind, TruncationWindow};
use qminkowski::operators::OperatorSet;
use qminkowski::qnum::DeformationParams;
use qminkowski::verify::expr::{gen, mul, prod, sc, scr, sum};
use qminkowski::verify::{build_sector, evaluate, relation_catalog, Environment, Expr, RelationSpec};

fn time_like() -> OperatorSet {
    build_sector(
        1.1,
        SectorKind::TimeLikeForward,
        1.0,
        TruncationWindow::new(3, (0, 8), (-2, 2), 0).unwrap(),
    )
    .unwrap()
}

fn entry(set: &OperatorSet, name: &str) -> RelationSpec {
    relation_catalog(&set.params)
        .into_iter()
        .find(|s| s.name == name)
        .unwrap_or_else(|| panic!("{name} not in catalog"))
}

fn residual(set: &OperatorSet, s: &RelationSpec) -> f64 {
    let r = evaluate(s, &Environment::new(set), 1e-10).unwrap();
    assert!(!r.inconclusive, "{} inconclusive", s.name);
    r.normalized
}

fn sum_terms(e: &Expr) -> Vec<Expr> {
    match e {
        Expr::Sum(t) => t.clone(),
        other => panic!("expected a sum, got {other}"),
    }
}

#[test]
fn time_time_heisenberg_needs_minus_lambda() {
    let set = time_like();
    let good = entry(&set, "XP-time-time");
    assert!(residual(&set, &good) < 1e-10);

    let mut variant = good.clone();
    let mut t = sum_terms(&good.lhs);
    t[2] = scr(-1.0, t[2].clone());
    variant.lhs = sum(t);
    assert!(residual(&set, &variant) > 1e-3);
}

#[test]
fn contracted_space_space_needs_corrected_coefficients() {
    let set = time_like();
    let p = set.params;
    let (q, b2, b3, lam) = (p.q(), p.br(2), p.br(3), p.lambda());
    let good = entry(&set, "XP-contracted");
    assert!(residual(&set, &good) < 1e-10);

    let mut variant = good.clone();
    let mut t = sum_terms(&good.lhs);
    t[2] = scr(-q.powi(4) * lam * b3 / b2, mul(gen("X0"), gen("P0")));
    variant.lhs = sum(t);
    variant.rhs = sc(
        Complex64::new(0.0, -0.5 * q * q * b2 * b3),
        mul(gen("Lam^-1/2"), gen("U")),
    );
    assert!(residual(&set, &variant) > 1e-3);
}

#[test]
fn casimir_needs_tau_factor_on_the_ladder_term() {
    for kind in [SectorKind::SpaceLike, SectorKind::LightLike] {
        let set = build_sector(1.1, kind, 1.0, TruncationWindow::new(3, (-4, 4), (0, 0), 0).unwrap()).unwrap();
        let good = entry(&set, "casimir-eigenvalue");
        assert!(residual(&set, &good) < 1e-10);

        let mut variant = good.clone();
        let mut t = sum_terms(&good.lhs);
        t[0] = scr(set.params.q(), prod(vec![gen("T-"), gen("T+")]));
        variant.lhs = sum(t);
        assert!(residual(&set, &variant) > 1e-3, "{kind}");
    }
}

#[test]
fn adjacency_quadratic_needs_two_over_bracket() {
    let p = DeformationParams::new(1.1).unwrap();
    let s = Sector::new(SectorKind::TimeLikeForward, 1.0, &p).unwrap();
    let (b2, c2, lam) = (p.br(2), p.cu(2), p.lambda());
    for n in 1..8 {
        let (tp, rp2) = s.point(n, 0, &p);
        let (t, _) = s.point(n + 1, 0, &p);
        assert!(check_spectral_condition(t, tp, rp2.sqrt(), 1.0, &p) < 1e-12);
        let variant = (t - lam / b2 * tp) * (t - c2 / b2 * tp) - lam * lam / (b2 * b2) * rp2;
        assert!(variant.abs() > 1e-3);
    }
}
