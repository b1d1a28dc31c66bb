//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use qminkowski::hilbert::{
    check_spectral_condition, spectrum_points, BasisLabel, Sector, SectorKind, TruncationWindow,
};
use qminkowski::operators::{
    rho, rho_partial_sum, x_reduced_closed, x_reduced_rho, BuildOptions, OperatorSet, ReducedKey,
};
use qminkowski::qnum::{sum_identity, DeformationParams};
use qminkowski::tensors::{
    build_projectors4, build_rhat3, build_rmatrix4, build_rmatrix4_inverse, projector_identity_residual, RMatrixVariant,
};
use qminkowski::verify::{
    build_sector, casimir_expr, evaluate_catalog, lightcone_obstruction, q_limit_probe, relation_catalog,
    solve_momentum_elements, Environment, VerifyOptions,
};
use qminkowski::Result;
use std::time::Instant;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = fn() -> Result<Outcome>;

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Runs the catalog on one sector; returns (all pass, worst without
/// momenta, worst with momenta, relations checked).
fn catalog_on(set: &OperatorSet) -> Result<(bool, f64, f64, usize)> {
    let catalog = relation_catalog(&set.params);
    let report = evaluate_catalog(&catalog, set, VerifyOptions::default())?;
    for f in report.failures() {
        eprintln!("  failing relation {} on {}: {:.3e}", f.name, f.sector, f.normalized);
    }
    Ok((
        report.all_pass(),
        report.worst(Some(false), &catalog),
        report.worst(Some(true), &catalog),
        report.reports.len(),
    ))
}

fn criterion_1() -> Result<Outcome> {
    let window = TruncationWindow::new(5, (-8, 8), (-4, 4), 0)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("single-thread pool");
    let start = Instant::now();
    let (ok, w, wp, n) = pool.install(|| -> Result<_> {
        let set = build_sector(1.1, SectorKind::SpaceLike, 1.0, window)?;
        catalog_on(&set)
    })?;
    let secs = start.elapsed().as_secs_f64();
    Ok(outcome(
        ok && w <= 1e-10 && wp <= 1e-9 && secs <= 60.0,
        format!("space-like, {n} relations, worst {w:.2e} (momenta {wp:.2e}), {secs:.1} s single-threaded"),
    ))
}

fn criterion_2() -> Result<Outcome> {
    let window = TruncationWindow::new(5, (0, 12), (-4, 4), 0)?;
    let mut parts = Vec::new();
    let mut pass = true;
    for kind in [SectorKind::TimeLikeForward, SectorKind::TimeLikeBackward] {
        let set = build_sector(1.1, kind, 1.0, window)?;
        let (ok, w, wp, n) = catalog_on(&set)?;
        pass &= ok && w <= 1e-10 && wp <= 1e-9;
        parts.push(format!("{kind}: {n} relations, worst {w:.2e} (momenta {wp:.2e})"));
    }
    Ok(outcome(pass, parts.join("; ")))
}

fn criterion_3() -> Result<Outcome> {
    let (mut table, mut rho_dev, mut rho_raw, mut sum_dev): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for q in [1.1, 1.5] {
        let p = DeformationParams::new(q)?;
        for kind in [
            SectorKind::SpaceLike,
            SectorKind::TimeLikeForward,
            SectorKind::TimeLikeBackward,
        ] {
            let sector = Sector::new(kind, 1.0, &p)?;
            let w = TruncationWindow::default_for(kind);
            for n in w.n_lo..=w.n_hi {
                for level in w.level_lo..=w.level_hi {
                    for j in 0..=w.j_max {
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
                            table =
                                table.max((x_reduced_closed(&sector, &p, &k)? - x_reduced_rho(&sector, &p, &k)).abs());
                        }
                    }
                    // ρ is a difference of an r² term and a t² term that cancel
                    // exactly at the time-like edge j = n, so the deviation is
                    // measured against the size of the two summands.
                    let (_, r2) = sector.point(n, level, &p);
                    let r_term = r2.abs() / (p.q().powi(2) * p.br(2));
                    for jj in 1..=11 {
                        let a = rho(&sector, &p, n, level, jj);
                        let b = rho_partial_sum(&sector, &p, n, level, jj);
                        let summands = r_term + (a + r2 / (p.q().powi(2) * p.br(2))).abs();
                        rho_dev = rho_dev.max((a - b).abs() / summands.max(1.0));
                        rho_raw = rho_raw.max((a - b).abs() / a.abs().max(1.0));
                    }
                }
            }
        }
    }
    for q in [1.01, 1.1, 1.5, 2.0] {
        let p = DeformationParams::new(q)?;
        for j in 1..=30 {
            let (l, r) = sum_identity(j, &p)?;
            sum_dev = sum_dev.max((l - r).abs() / r.abs().max(l.abs()));
        }
    }
    Ok(outcome(
        table <= 1e-12 && rho_dev <= 1e-12 && sum_dev <= 1e-12,
        format!("X tables vs rho route {table:.2e}; rho forms (j <= 10, relative to summands) {rho_dev:.2e} (relative to value {rho_raw:.2e}); sum identity (j <= 30, relative) {sum_dev:.2e}"),
    ))
}

fn small_window(kind: SectorKind) -> Result<TruncationWindow> {
    if kind.is_time_like() {
        TruncationWindow::new(4, (0, 8), (-1, 1), 0)
    } else {
        TruncationWindow::new(4, (-5, 5), (-1, 1), 0)
    }
}

const ALL: [SectorKind; 4] = [
    SectorKind::SpaceLike,
    SectorKind::TimeLikeForward,
    SectorKind::TimeLikeBackward,
    SectorKind::LightLike,
];

fn criterion_4() -> Result<Outcome> {
    let (mut cas, mut offd, mut tau, mut conj): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for kind in ALL {
        let set = build_sector(1.1, kind, 1.0, small_window(kind)?)?;
        let p = set.params;
        let env = Environment::new(&set);
        let expr = casimir_expr(&p);
        let (_, halo) = expr.budget(&env)?;
        let c = expr.evaluate(&env)?;
        let interior = set.basis.interior_indices(halo);
        let mut mask = vec![false; set.basis.dim()];
        for &i in &interior {
            mask[i] = true;
        }
        offd = offd.max(c.restricted_offdiag(&mask));
        for &i in &interior {
            let l = set.basis.label(i);
            cas = cas.max((c.get(i, i).re - p.br(l.j) * p.br(l.j + 1)).abs());
            tau = tau.max((set.su.tau.get(i, i).re - p.powi(-4 * l.m)).abs() / p.powi(-4 * l.m).max(1.0));
        }
        let catalog: Vec<_> = relation_catalog(&p)
            .into_iter()
            .filter(|s| s.name.starts_with("conj-T"))
            .collect();
        let rep = evaluate_catalog(&catalog, &set, VerifyOptions::default())?;
        conj = conj.max(rep.worst(None, &catalog));
        if !rep.all_pass() {
            conj = f64::INFINITY;
        }
    }
    Ok(outcome(
        cas <= 1e-10 && offd <= 1e-10 && tau <= 1e-12 && conj <= 1e-10,
        format!(
            "T^2 - [j][j+1] {cas:.2e} (off-diagonal {offd:.2e}); tau - q^(-4m) {tau:.2e}; T conjugation {conj:.2e}"
        ),
    ))
}

fn criterion_5() -> Result<Outcome> {
    let (mut u_dev, mut lam_dev): (f64, f64) = (0.0, 0.0);
    let mut u_count = 0;
    for kind in ALL {
        let p = DeformationParams::new(1.1)?;
        let sector = Sector::new(kind, 1.0, &p)?;
        let phases: Vec<f64> = if kind == SectorKind::LightLike {
            (0..16).map(|k| 0.37 * k as f64).collect()
        } else {
            Vec::new()
        };
        let set = OperatorSet::build(&p, sector, small_window(kind)?, &BuildOptions { light_phases: phases })?;
        let target = 1.0 / p.br(2).powi(2);
        let w = set.basis.window();
        for n in w.n_lo..w.n_hi {
            for level in w.level_lo..=w.level_hi {
                let a = set.basis.index_of(&BasisLabel::new(0, 0, n, level));
                let b = set.basis.index_of(&BasisLabel::new(0, 0, n + 1, level));
                if let (Some(a), Some(b)) = (a, b) {
                    u_dev = u_dev.max((set.u.get(a, b).norm_sqr() - target).abs());
                    u_count += 1;
                }
            }
        }
        let q2 = p.q().powi(2);
        for (_, _, v) in set.lam_half.iter() {
            lam_dev = lam_dev.max((v.norm() - q2).abs());
        }
    }
    Ok(outcome(
        u_dev <= 1e-12 && lam_dev <= 1e-12 && u_count > 0,
        format!("|U|^2 - 1/[2]^2 {u_dev:.2e} over {u_count} pairs in all sectors; |Lambda^1/2| - q^2 {lam_dev:.2e}"),
    ))
}

fn criterion_6() -> Result<Outcome> {
    let p = DeformationParams::new(1.1)?;
    let (mut inv, mut adj): (f64, f64) = (0.0, 0.0);
    let mut count = 0;
    for kind in [
        SectorKind::TimeLikeForward,
        SectorKind::TimeLikeBackward,
        SectorKind::SpaceLike,
    ] {
        let sector = Sector::new(kind, 1.0, &p)?;
        let n_range = if kind.is_time_like() { (0, 20) } else { (-20, 20) };
        let pts = spectrum_points(sector, &p, n_range, (-4, 4))?;
        count += pts.len();
        for pt in &pts {
            let s2 = sector.invariant_length(pt.level, &p);
            let expect = if kind == SectorKind::SpaceLike {
                -p.powi(2 * pt.level)
            } else {
                p.powi(2 * pt.level)
            };
            inv = inv.max(((pt.t * pt.t - pt.r * pt.r) - expect).abs() / expect.abs());
            inv = inv.max((s2 - expect).abs() / expect.abs());
        }
        for pair in pts.windows(2).filter(|w| w[0].level == w[1].level) {
            let s2 = sector.invariant_length(pair[0].level, &p);
            adj = adj.max(check_spectral_condition(pair[1].t, pair[0].t, pair[0].r, s2, &p));
        }
    }
    let forward = Sector::new(SectorKind::TimeLikeForward, 1.0, &p)?;
    let far = spectrum_points(forward, &p, (40, 40), (0, 0))?[0];
    let acc = (far.t / far.r - 1.0).abs();
    Ok(outcome(
        inv <= 1e-12 && adj <= 1e-12 && acc <= 2e-3,
        format!(
            "{count} points: t^2 - r^2 = +-q^(2M) {inv:.2e} relative; adjacency {adj:.2e}; |t40/r40 - 1| = {acc:.3e}"
        ),
    ))
}

fn criterion_7() -> Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    for q in [1.1, 1.5] {
        let set = build_sector(
            q,
            SectorKind::LightLike,
            1.0,
            TruncationWindow::new(3, (-6, 6), (0, 0), 0)?,
        )?;
        let rep = lightcone_obstruction(&set)?;
        let u_scale = 1.0 / set.params.br(2);
        let ok = rep.max_singular_ratio <= 1e-12
            && rep.min_inhomogeneity >= 0.4 * u_scale
            && rep.verdict.starts_with("no representation");
        pass &= ok;
        parts.push(format!(
            "q={q}: sigma ratio {:.1e}, inhomogeneity {:.4} (U scale {:.4})",
            rep.max_singular_ratio, rep.min_inhomogeneity, u_scale
        ));
        let timelike = build_sector(
            q,
            SectorKind::TimeLikeForward,
            1.0,
            TruncationWindow::new(3, (0, 8), (-2, 2), 0)?,
        )?;
        let solved = solve_momentum_elements(&timelike)?;
        let ok = solved.pairs > 0
            && solved.min_relative_det > 1e-6
            && solved.max_p0_deviation <= 1e-10
            && solved.max_xop_deviation <= 1e-10;
        pass &= ok;
        parts.push(format!(
            "time-like solve: {} pairs, min |det|/|H|^2 {:.1e}, P0 {:.1e}, XoP {:.1e}",
            solved.pairs, solved.min_relative_det, solved.max_p0_deviation, solved.max_xop_deviation
        ));
    }
    Ok(outcome(
        pass,
        format!("no representation on the light cone; {}", parts.join("; ")),
    ))
}

fn criterion_8() -> Result<Outcome> {
    let (mut proj, mut inv, mut braid): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut ranks_ok = true;
    for q in [1.01, 1.1, 1.5] {
        let p = DeformationParams::new(q)?;
        let pr = build_projectors4(&p);
        proj = proj.max(projector_identity_residual(&pr));
        for (t, want) in [
            (&pr.trace, 1.0),
            (&pr.plus, 3.0),
            (&pr.minus, 3.0),
            (&pr.symmetric, 9.0),
        ] {
            ranks_ok &= (t.trace() - want).abs() <= 1e-12;
        }
        let r2 = build_rmatrix4(RMatrixVariant::II, &pr, &p).to_matrix();
        let r2i = build_rmatrix4_inverse(&pr, &p).to_matrix();
        let id = nalgebra::DMatrix::<f64>::identity(16, 16);
        inv = inv.max((&r2 * &r2i - &id).amax()).max((&r2i * &r2 - &id).amax());
        braid = braid.max(build_rhat3(&p).braid_residual());
        for v in [RMatrixVariant::I, RMatrixVariant::II] {
            braid = braid.max(build_rmatrix4(v, &pr, &p).braid_residual());
        }
    }
    Ok(outcome(
        proj <= 1e-13 && inv <= 1e-13 && braid <= 1e-12 && ranks_ok,
        format!("projector identities {proj:.2e}; ranks (1,3,3,9) {ranks_ok}; R_II R_II^-1 - 1 {inv:.2e}; braid {braid:.2e}"),
    ))
}

fn criterion_9() -> Result<Outcome> {
    let rows = q_limit_probe(&[1.01, 1.001])?;
    let ratio = rows[0].normalized / rows[1].normalized;
    Ok(outcome(
        (5.0..=20.0).contains(&ratio),
        format!(
            "[X^A, X^B] residual {:.3e} at q=1.01, {:.3e} at q=1.001, ratio {ratio:.2}",
            rows[0].normalized, rows[1].normalized
        ),
    ))
}

fn main() {
    let criteria: [(&str, Criterion); 9] = [
        ("relation suite, space-like", criterion_1),
        ("relation suite, time-like forward and backward", criterion_2),
        ("closed forms vs recursions", criterion_3),
        ("angular-momentum spectra", criterion_4),
        ("normalisation of U and Lambda", criterion_5),
        ("spectral lattice", criterion_6),
        ("light-cone obstruction", criterion_7),
        ("tensor identities", criterion_8),
        ("classical limit", criterion_9),
    ];
    let mut failed = 0;
    for (i, (title, f)) in criteria.iter().enumerate() {
        let o = f().unwrap_or_else(|e| outcome(false, format!("error: {e}")));
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {}: {} - {title}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
