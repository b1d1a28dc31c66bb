//! Builders for every generator of the algebra on a truncated basis.
//!
//! Vector operators (`X^A`, `R^A`, `S^A`, `P^A`) are produced in two steps: a
//! [`ReducedElementTable`] of reduced matrix elements `⟨j′,n′,M′‖O⁻‖j,n,M⟩` is
//! tabulated on the basis, and [`assemble_vector_operator`] dresses it with the
//! SU_q(2) m-dependence.  Scalars (`X⁰`, `X∘X`, `U`, `Λ^{±1/2}`, `P⁰`) are
//! written down directly.  The rotation generators `L^A`, the element `W` and
//! the SU_q(2) generators `T^±`, `τ` are derived from products of the above.
//!
//! Matrix elements into labels outside the sector constraints (time-like
//! `n < 0` or `j > n`) are zero; so are elements into labels outside the
//! truncation window, which is why relation residuals are only meaningful on
//! an interior subspace (see [`BasisMap::interior_indices`]).

use crate::error::{Error, Result};
use crate::hilbert::{enumerate_basis, BasisLabel, BasisMap, Sector, SectorKind, ShiftBudget, TruncationWindow};
use crate::qnum::DeformationParams;
use crate::sparse::{ShiftSignature, SparseOperator};
use crate::tensors::{Tensors, MINUS, PLUS, THREE};
use num_complex::Complex64;
use std::collections::BTreeMap;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `√x`, with non-positive arguments mapped to 0.  Square-root factors in the
/// tables vanish exactly at the edges of the admissible region; rounding can
/// leave a tiny negative remainder there.
fn sqrt0(x: f64) -> f64 {
    if x > 0.0 {
        x.sqrt()
    } else {
        0.0
    }
}

/// `√(num/den)` with the lattice-exit convention: a vanishing denominator
/// (which only occurs for elements leaving the admissible region) gives 0.
fn sqrt_ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        sqrt0(num / den)
    }
}

/// Key of a reduced matrix element `⟨j′, n′, M′ ‖ O⁻ ‖ j, n, M⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReducedKey {
    pub jp: i64,
    pub np: i64,
    pub levelp: i64,
    pub j: i64,
    pub n: i64,
    pub level: i64,
}

/// Reduced matrix elements of one vector operator on a truncated basis.
#[derive(Debug, Clone)]
pub struct ReducedElementTable {
    /// Operator name, e.g. `"X"`.
    pub operator: String,
    /// Allowed `n′ − n`.
    pub dn: Vec<i64>,
    /// Allowed `M′ − M` (light cone: `[0]`).
    pub dlevel: Vec<i64>,
    entries: BTreeMap<ReducedKey, Complex64>,
}

impl ReducedElementTable {
    /// Evaluates `f` on every `(j′, n′, M′; j, n, M)` with both ends in the
    /// basis, `j′ ∈ {j−1, j, j+1}`, `n′ − n ∈ dn`, `M′ − M ∈ dlevel`.
    pub fn tabulate(
        operator: &str,
        basis: &BasisMap,
        dn: &[i64],
        dlevel: &[i64],
        mut f: impl FnMut(ReducedKey) -> Complex64,
    ) -> Self {
        let mut entries = BTreeMap::new();
        for l in basis.labels().iter().filter(|l| l.m == 0) {
            for jp in (l.j - 1)..=(l.j + 1) {
                for d in dn {
                    for dl in dlevel {
                        let target = BasisLabel::new(jp, 0, l.n + d, l.level + dl);
                        if jp < 0 || basis.index_of(&target).is_none() {
                            continue;
                        }
                        let key = ReducedKey {
                            jp,
                            np: target.n,
                            levelp: target.level,
                            j: l.j,
                            n: l.n,
                            level: l.level,
                        };
                        entries.insert(key, f(key));
                    }
                }
            }
        }
        Self {
            operator: operator.to_string(),
            dn: dn.to_vec(),
            dlevel: dlevel.to_vec(),
            entries,
        }
    }

    /// The stored element, or 0.
    pub fn get(&self, k: &ReducedKey) -> Complex64 {
        self.entries.get(k).copied().unwrap_or(re(0.0))
    }

    /// All stored elements in key order.
    pub fn iter(&self) -> impl Iterator<Item = (&ReducedKey, &Complex64)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Component of a vector operator.
fn dm_of(comp: usize) -> i64 {
    match comp {
        PLUS => 1,
        MINUS => -1,
        _ => 0,
    }
}

/// The m-dependent factor relating `⟨j′, m+Δm | O^A | j, m⟩` to the reduced
/// element `⟨j′‖O⁻‖j⟩` (SU_q(2) Wigner–Eckart factors).
pub fn wigner_eckart_factor(p: &DeformationParams, comp: usize, jp: i64, j: i64, m: i64) -> f64 {
    let q = p.q();
    let b = |k: i64| p.br(k);
    let s1 = (1.0 + q * q).sqrt();
    let m_f = m as f64;
    let j_f = j as f64;
    match (comp, jp - j) {
        (PLUS, 0) => -p.powi(m + 2) * sqrt0(b(j + m + 1) * b(j - m)),
        (PLUS, 1) => p.powi(m - 2 * j) * sqrt0(b(j + m + 1) * b(j + m + 2)),
        (PLUS, -1) => p.powi(m + 2 * j + 2) * sqrt0(b(j - m) * b(j - m - 1)),
        (MINUS, 0) => p.powi(m) * sqrt0(b(j + m) * b(j - m + 1)),
        (MINUS, 1) => p.powi(m) * sqrt0(b(j - m + 1) * b(j - m + 2)),
        (MINUS, -1) => p.powi(m) * sqrt0(b(j + m) * b(j + m - 1)),
        (THREE, 0) => {
            q.powf(1.5) * s1 / (q * q - 1.0)
                * (p.pow(2.0 * m_f) - (p.pow(2.0 * j_f + 1.0) + p.pow(-2.0 * j_f - 1.0)) / (q + 1.0 / q))
        }
        (THREE, 1) => p.pow(m_f - j_f - 0.5) * s1 * sqrt0(b(j - m + 1) * b(j + m + 1)),
        (THREE, -1) => -p.pow(m_f + j_f + 0.5) * s1 * sqrt0(b(j - m) * b(j + m)),
        _ => 0.0,
    }
}

/// Dresses a reduced table with the m-dependence, returning `(O⁺, O⁻, O³)`.
pub fn assemble_vector_operator(
    p: &DeformationParams,
    table: &ReducedElementTable,
    basis: &BasisMap,
) -> Result<[SparseOperator; 3]> {
    let mut trip: [Vec<(usize, usize, Complex64)>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for (col, l) in basis.labels().iter().enumerate() {
        for (key, red) in table
            .iter()
            .filter(|(k, _)| k.j == l.j && k.n == l.n && k.level == l.level)
        {
            if *red == re(0.0) {
                continue;
            }
            for comp in [PLUS, MINUS, THREE] {
                let target = BasisLabel::new(key.jp, l.m + dm_of(comp), key.np, key.levelp);
                if let Some(row) = basis.index_of(&target) {
                    let f = wigner_eckart_factor(p, comp, key.jp, l.j, l.m);
                    if f != 0.0 {
                        trip[comp].push((row, col, red * f));
                    }
                }
            }
        }
    }
    let name = &table.operator;
    let suffix = ["+", "-", "3"];
    let mut out = Vec::with_capacity(3);
    for (comp, t) in trip.into_iter().enumerate() {
        let sig = ShiftSignature::new(&[-1, 0, 1], &[dm_of(comp)], &table.dn, &table.dlevel);
        let op = SparseOperator::from_triplets(format!("{name}{}", suffix[comp]), basis.dim(), t, sig);
        op.audit_signature(basis, None, 0.0)?;
        out.push(op);
    }
    Ok(out.try_into().expect("three components"))
}

// ---------------------------------------------------------------------------
// Coordinates
// ---------------------------------------------------------------------------

/// `ρ(j+1) = (−r² + [j][j+2]λ²t²/{j+1}²)/(q²[2])` on the lattice point
/// `(n, M)`; argument `jj = j + 1 ≥ 1`.
pub fn rho(sector: &Sector, p: &DeformationParams, n: i64, level: i64, jj: i64) -> f64 {
    let (t, r2) = sector.point(n, level, p);
    let j = jj - 1;
    let lam = p.lambda();
    (-r2 + p.br(j) * p.br(j + 2) * lam * lam * t * t / p.cu(j + 1).powi(2)) / (p.q().powi(2) * p.br(2))
}

/// The partial-sum form
/// `ρ(j+1) = ρ(1) + λ²[2]q^{-2}t² Σ_{l=1..j} [2l+1]/({l}²{l+1}²)` with
/// `ρ(1) = −r²/(q²[2])`.
pub fn rho_partial_sum(sector: &Sector, p: &DeformationParams, n: i64, level: i64, jj: i64) -> f64 {
    let (t, r2) = sector.point(n, level, p);
    let q2 = p.q().powi(2);
    let lam = p.lambda();
    let sum: f64 = (1..jj)
        .map(|l| p.br(2 * l + 1) / (p.cu(l).powi(2) * p.cu(l + 1).powi(2)))
        .sum();
    -r2 / (q2 * p.br(2)) + lam * lam * p.br(2) / q2 * t * t * sum
}

/// `⟨j′‖X⁻‖j⟩` (diagonal in `n`, `M`) from `ρ`:
/// `⟨j+1‖X⁻‖j⟩ = σ q^{j+1} √(−ρ(j+1)/([2j+1][2j+3]))`,
/// `⟨j‖X⁻‖j+1⟩ = −σ q^{−j−1} √(…)`,
/// `⟨j‖X⁻‖j⟩ = −λq^{-1}√[2] [j][j+1]/([2j][2j+2]) t` for `j ≥ 1`,
/// where `σ` is the sign of `t₀`.
pub fn x_reduced_rho(sector: &Sector, p: &DeformationParams, k: &ReducedKey) -> f64 {
    if k.np != k.n || k.levelp != k.level {
        return 0.0;
    }
    let q = p.q();
    let b = |x: i64| p.br(x);
    let sg = sector.sign();
    let (j, n, level) = (k.j, k.n, k.level);
    match k.jp - j {
        1 => {
            let rh = rho(sector, p, n, level, j + 1);
            sg * p.powi(j + 1) * sqrt0(-rh / (b(2 * j + 1) * b(2 * j + 3)))
        }
        0 if j == 0 => 0.0,
        0 => {
            let (t, _) = sector.point(n, level, p);
            -p.lambda() / q * b(2).sqrt() * b(j) * b(j + 1) / (b(2 * j) * b(2 * j + 2)) * t
        }
        -1 => {
            let kk = j - 1;
            let rh = rho(sector, p, n, level, kk + 1);
            -sg * p.powi(-kk - 1) * sqrt0(-rh / (b(2 * kk + 1) * b(2 * kk + 3)))
        }
        _ => 0.0,
    }
}

/// `⟨j′‖X⁻‖j⟩` from the closed-form tables (space- and time-like sectors).
pub fn x_reduced_closed(sector: &Sector, p: &DeformationParams, k: &ReducedKey) -> Result<f64> {
    if k.np != k.n || k.levelp != k.level {
        return Ok(0.0);
    }
    let q = p.q();
    let (b, c) = (|x: i64| p.br(x), |x: i64| p.cu(x));
    let lam = p.lambda();
    let s = sector.level_scale(k.level, p);
    let (j, n) = (k.j, k.n);
    let denom = |i: i64| c(i + 1) * (b(2) * b(2 * i + 1) * b(2 * i + 3)).sqrt();
    Ok(match (sector.kind, k.jp - j) {
        (SectorKind::LightLike, _) => {
            return Err(Error::NoRepresentation(
                "no closed-form coordinate table on the light cone".into(),
            ))
        }
        (SectorKind::SpaceLike, 1) => s * p.powi(j) * sqrt0(c(n + j + 1) * c(n - j - 1)) / denom(j),
        (SectorKind::SpaceLike, 0) if j > 0 => -s * b(n) * lam * lam / (q * b(2).sqrt() * c(j) * c(j + 1)),
        (SectorKind::SpaceLike, -1) => {
            let kk = j - 1;
            -s * p.powi(-kk - 2) * sqrt0(c(n + kk + 1) * c(n - kk - 1)) / denom(kk)
        }
        (_, 1) => s * p.powi(j) * lam * sqrt0(b(n - j) * b(n + j + 2)) / denom(j),
        (_, 0) if j > 0 => -lam * s * c(n + 1) / (q * b(2).sqrt() * c(j) * c(j + 1)),
        (_, -1) => {
            let kk = j - 1;
            -s * p.powi(-kk - 2) * lam * sqrt0(b(n - kk) * b(n + kk + 2)) / denom(kk)
        }
        _ => 0.0,
    })
}

/// Reduced coordinate table via the ρ route.
pub fn reduced_x_table(sector: &Sector, p: &DeformationParams, basis: &BasisMap) -> ReducedElementTable {
    ReducedElementTable::tabulate("X", basis, &[0], &[0], |k| re(x_reduced_rho(sector, p, &k)))
}

/// The diagonal operators `X⁰` and `X∘X`.
pub fn diag_x0_xcircx(sector: &Sector, p: &DeformationParams, basis: &BasisMap) -> (SparseOperator, SparseOperator) {
    let (t, r2): (Vec<_>, Vec<_>) = basis
        .labels()
        .iter()
        .map(|l| {
            let (t, r2) = sector.point(l.n, l.level, p);
            (re(t), re(r2))
        })
        .unzip();
    (SparseOperator::diagonal("X0", &t), SparseOperator::diagonal("XoX", &r2))
}

// ---------------------------------------------------------------------------
// Lorentz generators
// ---------------------------------------------------------------------------

/// Which of the two vector generators of the q-Lorentz algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LorentzVector {
    R,
    S,
}

/// `⟨j′, n′‖R⁻‖j, n⟩` or `⟨j′, n′‖S⁻‖j, n⟩` from the closed-form tables
/// (space- and time-like sectors; diagonal in `M`, `n′ = n ± 1`).
pub fn rs_reduced_closed(kind: SectorKind, which: LorentzVector, p: &DeformationParams, k: &ReducedKey) -> Result<f64> {
    if kind == SectorKind::LightLike {
        return Err(Error::NoRepresentation(
            "no closed-form Lorentz-generator table on the light cone".into(),
        ));
    }
    if k.levelp != k.level || (k.np - k.n).abs() != 1 {
        return Ok(0.0);
    }
    let q = p.q();
    let (b, c) = (|x: i64| p.br(x), |x: i64| p.cu(x));
    let lam = p.lambda();
    let f = |x: i64| if kind == SectorKind::SpaceLike { c(x) } else { b(x + 1) };
    let d = k.np - k.n;
    let (j, n, n2) = (k.j, k.n, k.np);
    let b32 = b(2).powf(1.5);
    let is_r = which == LorentzVector::R;
    Ok(match k.jp - j {
        1 => {
            let pre = if is_r { p.powi(2 * j - 1) } else { q.powi(-3) };
            d as f64 * pre / (c(j + 1) * b32 * lam * (b(2 * j + 1) * b(2 * j + 3)).sqrt())
                * sqrt_ratio(f(d * (j + 1) + n2) * f(d * j + n2), f(n) * f(n2))
        }
        0 if j == 0 => 0.0,
        0 => {
            let sgn = if is_r { 1.0 } else { -1.0 };
            sgn * q.powi(-3) / (c(j + 1) * c(j) * b32) * sqrt_ratio(f(d * j + n2) * f(n - d * j), f(n) * f(n2))
        }
        -1 => {
            let kk = j - 1;
            let pre = if is_r { p.powi(-2 * kk - 5) } else { q.powi(-3) };
            -(d as f64) * pre / (c(kk + 1) * b32 * lam * (b(2 * kk + 1) * b(2 * kk + 3)).sqrt())
                * sqrt_ratio(f(n2 - d * (kk + 1)) * f(n - d * (kk + 1)), f(n) * f(n2))
        }
        _ => 0.0,
    })
}

/// The lowest reduced elements of `R⁻` linking `j = 0` and `j = 1`, which
/// seed the recursion in `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RSeed {
    /// `⟨1, n‖R⁻‖0, n−1⟩`.
    UpFromBelow,
    /// `⟨1, n‖R⁻‖0, n+1⟩`.
    UpFromAbove,
    /// `⟨0, n‖R⁻‖1, n−1⟩`.
    DownFromBelow,
    /// `⟨0, n‖R⁻‖1, n+1⟩`.
    DownFromAbove,
}

/// Explicit `j ∈ {0, 1}` elements of `R⁻` in each sector.
pub fn r_seed(kind: SectorKind, p: &DeformationParams, n: i64, which: RSeed) -> f64 {
    let q = p.q();
    let (b, c) = (|x: i64| p.br(x), |x: i64| p.cu(x));
    let base = 1.0 / (b(2).powf(2.5) * b(3).sqrt() * p.lambda());
    use RSeed::*;
    match kind {
        SectorKind::LightLike => match which {
            UpFromBelow => base,
            UpFromAbove => -base / q.powi(2),
            DownFromBelow => -base / q.powi(6),
            DownFromAbove => base / q.powi(4),
        },
        SectorKind::SpaceLike => match which {
            UpFromBelow => base / q * sqrt_ratio(c(n + 1), c(n - 1)),
            UpFromAbove => -base / q * sqrt_ratio(c(n - 1), c(n + 1)),
            DownFromBelow => -base / q.powi(5) * sqrt_ratio(c(n - 2), c(n)),
            DownFromAbove => base / q.powi(5) * sqrt_ratio(c(n + 2), c(n)),
        },
        _ => match which {
            UpFromBelow => base / q * sqrt_ratio(b(n + 2), b(n)),
            UpFromAbove => -base / q * sqrt_ratio(b(n), b(n + 2)),
            DownFromBelow => -base / q.powi(5) * sqrt_ratio(b(n - 1), b(n + 1)),
            DownFromAbove => base / q.powi(5) * sqrt_ratio(b(n + 3), b(n + 1)),
        },
    }
}

/// `⟨j′, n′‖R⁻‖j, n⟩` from the recursion in `j`: the `j = 0, 1` seeds are
/// propagated with products of `ρ`.  Works in every sector; it is the only
/// route on the light cone.
pub fn r_reduced_recursion(sector: &Sector, p: &DeformationParams, k: &ReducedKey) -> f64 {
    if k.levelp != k.level || (k.np - k.n).abs() != 1 {
        return 0.0;
    }
    let q = p.q();
    let (b, c) = (|x: i64| p.br(x), |x: i64| p.cu(x));
    let level = k.level;
    let prod = |n: i64, lo: i64, hi: i64| -> f64 { (lo..=hi).map(|jj| rho(sector, p, n, level, jj)).product() };
    let d = k.np - k.n;
    let (j, n, np) = (k.j, k.n, k.np);
    let kind = sector.kind;
    match k.jp - j {
        1 => {
            let seed = r_seed(
                kind,
                p,
                np,
                if d == 1 { RSeed::UpFromBelow } else { RSeed::UpFromAbove },
            );
            seed * p.powi(2 * j)
                * (b(3) / (b(2 * j + 1) * b(2 * j + 3))).sqrt()
                * sqrt_ratio(prod(np, 2, j + 1), prod(n, 1, j))
        }
        -1 => {
            let kk = j - 1;
            let seed = r_seed(
                kind,
                p,
                np,
                if d == 1 {
                    RSeed::DownFromBelow
                } else {
                    RSeed::DownFromAbove
                },
            );
            seed * p.powi(-2 * kk)
                * (b(3) / (b(2 * kk + 1) * b(2 * kk + 3))).sqrt()
                * sqrt_ratio(prod(n, 2, kk + 1), prod(np, 1, kk))
        }
        0 if j == 0 => 0.0,
        0 => {
            let (t, r2) = sector.point(n, level, p);
            let (tp, _) = sector.point(np, level, p);
            if r2 <= 0.0 {
                return 0.0;
            }
            let seed = r_seed(
                kind,
                p,
                np,
                if d == 1 { RSeed::UpFromBelow } else { RSeed::UpFromAbove },
            );
            // The element is odd in t; the sign of t₀ keeps it consistent with
            // the backward-time coordinate phases.
            sector.sign() * seed / r2.sqrt() * (tp * c(j) - t * c(j + 1)) / (c(j) * c(j + 1)) * b(2) * b(3).sqrt()
                / (q * q)
                * sqrt_ratio(prod(np, 2, j), prod(n, 2, j))
        }
        _ => 0.0,
    }
}

/// Reduced table of `R⁻` (closed tables off the light cone, recursion on it).
pub fn reduced_r_table(sector: &Sector, p: &DeformationParams, basis: &BasisMap) -> ReducedElementTable {
    ReducedElementTable::tabulate("R", basis, &[-1, 1], &[0], |k| {
        re(match sector.kind {
            SectorKind::LightLike => r_reduced_recursion(sector, p, &k),
            kind => rs_reduced_closed(kind, LorentzVector::R, p, &k).expect("closed table exists off the light cone"),
        })
    })
}

/// Reduced table of `S⁻` from the closed tables (space- and time-like only;
/// on the light cone `S` is obtained by conjugation, see [`s_from_conjugation`]).
pub fn reduced_s_table(sector: &Sector, p: &DeformationParams, basis: &BasisMap) -> Result<ReducedElementTable> {
    if sector.kind == SectorKind::LightLike {
        return Err(Error::NoRepresentation(
            "no closed-form S table on the light cone; use conjugation".into(),
        ));
    }
    Ok(ReducedElementTable::tabulate("S", basis, &[-1, 1], &[0], |k| {
        re(rs_reduced_closed(sector.kind, LorentzVector::S, p, &k).expect("checked above"))
    }))
}

/// `S^A` from the conjugation property `adj(R^A) = −g_AB S^B`:
/// `S⁻ = adj(R⁺)/q`, `S⁺ = q adj(R⁻)`, `S³ = −adj(R³)`.
pub fn s_from_conjugation(p: &DeformationParams, r: &[SparseOperator; 3]) -> [SparseOperator; 3] {
    let q = p.q();
    let sig = |dm: i64| ShiftSignature::new(&[-1, 0, 1], &[dm], &[-1, 1], &[0]);
    [
        r[MINUS].adjoint().scale_re(q).named("S+").with_signature(sig(1)),
        r[PLUS].adjoint().scale_re(1.0 / q).named("S-").with_signature(sig(-1)),
        r[THREE].adjoint().scale_re(-1.0).named("S3").with_signature(sig(0)),
    ]
}

/// `⟨j, m, n|U|j, m, n+1⟩` (real, symmetric in `n ↔ n+1`).
pub fn u_element(kind: SectorKind, p: &DeformationParams, j: i64, n: i64) -> f64 {
    let (b, c) = (|x: i64| p.br(x), |x: i64| p.cu(x));
    match kind {
        SectorKind::SpaceLike => sqrt_ratio(c(n - j) * c(n + j + 1), c(n) * c(n + 1)) / b(2),
        SectorKind::LightLike => 1.0 / b(2),
        _ => sqrt_ratio(b(n - j + 1) * b(n + j + 2), b(n + 1) * b(n + 2)) / b(2),
    }
}

/// The element `U`, linking `n ↔ n+1` at fixed `(j, m, M)`.
pub fn build_u(sector: &Sector, p: &DeformationParams, basis: &BasisMap) -> SparseOperator {
    let mut t = Vec::new();
    for (i, l) in basis.labels().iter().enumerate() {
        if let Some(k) = basis.index_of(&BasisLabel::new(l.j, l.m, l.n + 1, l.level)) {
            let v = re(u_element(sector.kind, p, l.j, l.n));
            t.push((i, k, v));
            t.push((k, i, v));
        }
    }
    SparseOperator::from_triplets("U", basis.dim(), t, ShiftSignature::new(&[0], &[0], &[-1, 1], &[0]))
}

/// `Λ^{1/2}` and its inverse.  Off the light cone `Λ^{1/2}` maps `M → M+1`
/// with element `q²`; on it `n → n+1` with element `e^{iα_n} q²`, where
/// `α_n = phases[n − n_lo]` (missing entries are 0).
pub fn build_lambda(
    sector: &Sector,
    p: &DeformationParams,
    basis: &BasisMap,
    phases: &[f64],
) -> (SparseOperator, SparseOperator) {
    let q2 = p.q().powi(2);
    let light = sector.kind == SectorKind::LightLike;
    let n_lo = basis.window().n_lo;
    let mut up = Vec::new();
    let mut down = Vec::new();
    for (i, l) in basis.labels().iter().enumerate() {
        let target = if light {
            BasisLabel::new(l.j, l.m, l.n + 1, l.level)
        } else {
            BasisLabel::new(l.j, l.m, l.n, l.level + 1)
        };
        if let Some(k) = basis.index_of(&target) {
            let alpha = if light {
                usize::try_from(l.n - n_lo)
                    .ok()
                    .and_then(|ix| phases.get(ix))
                    .copied()
                    .unwrap_or(0.0)
            } else {
                0.0
            };
            let ph = Complex64::from_polar(1.0, alpha);
            up.push((k, i, ph * q2));
            down.push((i, k, ph.conj() / q2));
        }
    }
    let sig = if light {
        ShiftSignature::new(&[0], &[0], &[1], &[0])
    } else {
        ShiftSignature::new(&[0], &[0], &[0], &[1])
    };
    let inv_sig = sig.reversed();
    (
        SparseOperator::from_triplets("Lam^1/2", basis.dim(), up, sig),
        SparseOperator::from_triplets("Lam^-1/2", basis.dim(), down, inv_sig),
    )
}

// ---------------------------------------------------------------------------
// Momenta
// ---------------------------------------------------------------------------

/// `⟨j′, n′, M′‖P⁻‖j, n, M⟩` (`n′ = n ± 1`, `M′ = M ± 1`).
///
/// The entries diagonal in `j` carry the prefactor `√[2]/(2{j}{j+1} s)`; the
/// Heisenberg relations fix this normalisation.
pub fn p_reduced(sector: &Sector, p: &DeformationParams, k: &ReducedKey) -> Result<Complex64> {
    if sector.kind == SectorKind::LightLike {
        return Err(Error::NoRepresentation(
            "momenta cannot be represented on the light cone".into(),
        ));
    }
    if (k.np - k.n).abs() != 1 || (k.levelp - k.level).abs() != 1 {
        return Ok(re(0.0));
    }
    let (b, c) = (|x: i64| p.br(x), |x: i64| p.cu(x));
    let lam = p.lambda();
    let up = k.levelp == k.level + 1;
    let dn = k.np - k.n;
    let s = sector.level_scale(k.level, p);
    let (j, n) = (k.j, k.n);
    let pw = |x: i64| p.powi(x);
    let off = |i: i64| 1.0 / (c(i + 1) * lam * s) * (b(2) / (b(2 * i + 1) * b(2 * i + 3))).sqrt();
    let diag = |j: i64| b(2).sqrt() / (2.0 * c(j) * c(j + 1) * s);
    let half = Complex64::new(0.0, 0.5);
    Ok(if sector.kind == SectorKind::SpaceLike {
        match (k.jp - j, dn) {
            (1, 1) => {
                half * (if up { pw(2 + 2 * j - n) } else { -pw(2 + n) })
                    * off(j)
                    * sqrt_ratio(c(n + j + 2) * c(n + j + 1), c(n) * c(n + 1))
            }
            (1, _) => {
                half * (if up { pw(2 + 2 * j + n) } else { -pw(2 - n) })
                    * off(j)
                    * sqrt_ratio(c(n - j - 2) * c(n - j - 1), c(n) * c(n - 1))
            }
            (0, _) if j == 0 => re(0.0),
            (0, 1) => {
                I * diag(j)
                    * (if up { pw(-n) } else { pw(2 + n) })
                    * sqrt_ratio(c(n + j + 1) * c(n - j), c(n) * c(n + 1))
            }
            (0, _) => {
                -I * diag(j)
                    * (if up { pw(n) } else { pw(2 - n) })
                    * sqrt_ratio(c(n - j - 1) * c(n + j), c(n) * c(n - 1))
            }
            (-1, 1) => {
                let kk = j - 1;
                -half
                    * (if up { pw(-2 - 2 * kk - n) } else { -pw(2 + n) })
                    * off(kk)
                    * sqrt_ratio(c(n - kk) * c(n - kk - 1), c(n) * c(n + 1))
            }
            (-1, _) => {
                let kk = j - 1;
                -half
                    * (if up { pw(-2 - 2 * kk + n) } else { -pw(2 - n) })
                    * off(kk)
                    * sqrt_ratio(c(n + kk + 1) * c(n + kk), c(n) * c(n - 1))
            }
            _ => re(0.0),
        }
    } else {
        match (k.jp - j, dn) {
            (1, 1) => {
                half * (if up { pw(1 + 2 * j - n) } else { pw(3 + n) })
                    * off(j)
                    * sqrt_ratio(b(n + j + 3) * b(n + j + 2), b(n + 2) * b(n + 1))
            }
            (1, _) => {
                -half
                    * (if up { pw(3 + 2 * j + n) } else { pw(1 - n) })
                    * off(j)
                    * sqrt_ratio(b(n - j - 1) * b(n - j), b(n) * b(n + 1))
            }
            (0, _) if j == 0 => re(0.0),
            (0, 1) => {
                I * diag(j)
                    * (if up { pw(-1 - n) } else { -pw(3 + n) })
                    * sqrt_ratio(b(n + j + 2) * b(n - j + 1), b(n + 2) * b(n + 1))
            }
            (0, _) => {
                I * diag(j)
                    * (if up { pw(1 + n) } else { -pw(1 - n) })
                    * sqrt_ratio(b(n + j + 1) * b(n - j), b(n) * b(n + 1))
            }
            (-1, 1) => {
                let kk = j - 1;
                -half
                    * (if up { pw(-3 - 2 * kk - n) } else { pw(3 + n) })
                    * off(kk)
                    * sqrt_ratio(b(n - kk + 1) * b(n - kk), b(n + 2) * b(n + 1))
            }
            (-1, _) => {
                let kk = j - 1;
                half * (if up { pw(-1 - 2 * kk + n) } else { pw(1 - n) })
                    * off(kk)
                    * sqrt_ratio(b(n + kk + 2) * b(n + kk + 1), b(n) * b(n + 1))
            }
            _ => re(0.0),
        }
    })
}

/// Reduced table of `P⁻`; errors on the light cone.
pub fn reduced_p_table(sector: &Sector, p: &DeformationParams, basis: &BasisMap) -> Result<ReducedElementTable> {
    if sector.kind == SectorKind::LightLike {
        return Err(Error::NoRepresentation(
            "momenta cannot be represented on the light cone".into(),
        ));
    }
    Ok(ReducedElementTable::tabulate("P", basis, &[-1, 1], &[-1, 1], |k| {
        p_reduced(sector, p, &k).expect("checked above")
    }))
}

/// `⟨j, m, n′, M′|P⁰|j, m, n, M⟩` for `n′ = n + dn`, `M′ = M + dlevel`.
pub fn p0_element(
    sector: &Sector,
    p: &DeformationParams,
    j: i64,
    n: i64,
    level: i64,
    dn: i64,
    dlevel: i64,
) -> Complex64 {
    let (b, c) = (|x: i64| p.br(x), |x: i64| p.cu(x));
    let lam = p.lambda();
    let s = sector.level_scale(level, p);
    let up = dlevel == 1;
    let pw = |x: i64| p.powi(x);
    let pre = I / (2.0 * lam * s);
    if sector.kind == SectorKind::SpaceLike {
        if dn == 1 {
            -pre * (if up { pw(1 - n) } else { pw(3 + n) }) * sqrt_ratio(c(n - j) * c(n + j + 1), c(n) * c(n + 1))
        } else {
            pre * (if up { pw(1 + n) } else { pw(3 - n) }) * sqrt_ratio(c(n - j - 1) * c(n + j), c(n) * c(n - 1))
        }
    } else if dn == 1 {
        -pre * (if up { pw(-n) } else { -pw(4 + n) }) * sqrt_ratio(b(n - j + 1) * b(n + j + 2), b(n + 1) * b(n + 2))
    } else {
        -pre * (if up { pw(2 + n) } else { -pw(2 - n) }) * sqrt_ratio(b(n - j) * b(n + j + 1), b(n) * b(n + 1))
    }
}

/// The time component `P⁰`; errors on the light cone.
pub fn build_p0(sector: &Sector, p: &DeformationParams, basis: &BasisMap) -> Result<SparseOperator> {
    if sector.kind == SectorKind::LightLike {
        return Err(Error::NoRepresentation(
            "momenta cannot be represented on the light cone".into(),
        ));
    }
    let mut t = Vec::new();
    for (i, l) in basis.labels().iter().enumerate() {
        for dn in [1, -1] {
            for dl in [1, -1] {
                if let Some(k) = basis.index_of(&BasisLabel::new(l.j, l.m, l.n + dn, l.level + dl)) {
                    t.push((k, i, p0_element(sector, p, l.j, l.n, l.level, dn, dl)));
                }
            }
        }
    }
    Ok(SparseOperator::from_triplets(
        "P0",
        basis.dim(),
        t,
        ShiftSignature::new(&[0], &[0], &[-1, 1], &[-1, 1]),
    ))
}

// ---------------------------------------------------------------------------
// Derived operators
// ---------------------------------------------------------------------------

/// Ordered scalar product `A∘B = g_AB A^A B^B`.
pub fn op_circ(tensors: &Tensors, a: &[SparseOperator; 3], b: &[SparseOperator; 3]) -> Result<SparseOperator> {
    let mut terms = Vec::new();
    for (i, ai) in a.iter().enumerate() {
        for (k, bk) in b.iter().enumerate() {
            let g = tensors.g.lower[i][k];
            if g != 0.0 {
                terms.push((re(g), ai.matmul(bk)?));
            }
        }
    }
    let refs: Vec<_> = terms.iter().map(|(c, o)| (*c, o)).collect();
    Ok(SparseOperator::linear_combination(&refs)?.named(format!("{}o{}", base_name(&a[0]), base_name(&b[0]))))
}

fn base_name(o: &SparseOperator) -> String {
    o.name().trim_end_matches(['+', '-', '3']).to_string()
}

/// Conjugate transpose (the algebra's conjugation in the orthonormal basis).
pub fn adjoint(op: &SparseOperator) -> SparseOperator {
    op.adjoint()
}

/// The Lorentz generators in 4d notation:
/// `V^{A0} = R^A + q²S^A`, `V^{0A} = −q²R^A − S^A`,
/// `V^{AB} = ε_C^{AB}(R^C − S^C)`, `V^{00} = 0`.
pub fn build_v(
    tensors: &Tensors,
    r: &[SparseOperator; 3],
    s: &[SparseOperator; 3],
) -> Result<Vec<Vec<SparseOperator>>> {
    let dim = r[0].dim();
    if s.iter().chain(r.iter()).any(|o| o.dim() != dim) {
        return Err(Error::BasisMismatch("R and S live on different bases".into()));
    }
    let q2 = tensors.params.q().powi(2);
    let one = re(1.0);
    let mut v = vec![vec![SparseOperator::zeros(dim); 4]; 4];
    let diff: Vec<SparseOperator> = (0..3).map(|c| &r[c] - &s[c]).collect();
    for a in 0..3 {
        v[a][3] = SparseOperator::linear_combination(&[(one, &r[a]), (re(q2), &s[a])])?;
        v[3][a] = SparseOperator::linear_combination(&[(re(-q2), &r[a]), (-one, &s[a])])?;
        for b in 0..3 {
            let terms: Vec<_> = (0..3)
                .filter(|&c| tensors.eps.left_lower[c][a][b] != 0.0)
                .map(|c| (re(tensors.eps.left_lower[c][a][b]), &diff[c]))
                .collect();
            if !terms.is_empty() {
                v[a][b] = SparseOperator::linear_combination(&terms)?;
            }
        }
    }
    for (a, row) in v.iter_mut().enumerate() {
        for (b, o) in row.iter_mut().enumerate() {
            let name = format!(
                "V{}{}",
                crate::tensors::COMPONENT_LABELS[a],
                crate::tensors::COMPONENT_LABELS[b]
            );
            *o = std::mem::replace(o, SparseOperator::zeros(dim)).named(name);
        }
    }
    Ok(v)
}

/// Rotations `L^A = ((q²+1)/q²)(U S^A − U R^A + (q⁴−1) ε_{CB}^A R^B S^C)` and
/// `W = U² − q²(q⁴−1)² R∘S`.
pub fn build_l_w(
    tensors: &Tensors,
    r: &[SparseOperator; 3],
    s: &[SparseOperator; 3],
    u: &SparseOperator,
) -> Result<([SparseOperator; 3], SparseOperator)> {
    let q = tensors.params.q();
    let q2 = q * q;
    let q4m1 = q2 * q2 - 1.0;
    let e = &tensors.eps.mixed;
    let mut ls = Vec::with_capacity(3);
    for a in 0..3 {
        let mut terms = vec![(re(1.0), u.matmul(&s[a])?), (re(-1.0), u.matmul(&r[a])?)];
        for b in 0..3 {
            for c in 0..3 {
                if e[c][b][a] != 0.0 {
                    terms.push((re(q4m1 * e[c][b][a]), r[b].matmul(&s[c])?));
                }
            }
        }
        let refs: Vec<_> = terms.iter().map(|(c, o)| (*c * ((q2 + 1.0) / q2), o)).collect();
        let sig = ShiftSignature::new(&[0], &[dm_of(a)], &[0], &[0]);
        ls.push(
            SparseOperator::linear_combination(&refs)?
                .named(format!("L{}", ["+", "-", "3"][a]))
                .with_signature(sig),
        );
    }
    let rs = op_circ(tensors, r, s)?;
    let w = SparseOperator::linear_combination(&[(re(1.0), &u.matmul(u)?), (re(-q2 * q4m1 * q4m1), &rs)])?
        .named("W")
        .with_signature(ShiftSignature::diagonal());
    Ok((ls.try_into().expect("three components"), w))
}

/// SU_q(2) generators derived from the rotations.
#[derive(Debug, Clone)]
pub struct SuQ2 {
    pub t_plus: SparseOperator,
    pub t_minus: SparseOperator,
    /// `τ₃ = N^{-2}`.
    pub tau: SparseOperator,
    /// `τ^{1/2} = N^{-1}`.
    pub tau_half: SparseOperator,
    /// `τ^{-1/2} = N`.
    pub tau_neg_half: SparseOperator,
}

/// Builds `T^±`, `τ` from `N = W + q²(1−q²)L³`, which must be diagonal and
/// positive on the states where `L` and `W` are exact.
///
/// `T⁺ = q²√(1+q²) τ^{1/2} L⁺`, `T⁻ = −q³√(1+q²) τ^{1/2} L⁻`.
pub fn build_t(tensors: &Tensors, l: &[SparseOperator; 3], w: &SparseOperator, basis: &BasisMap) -> Result<SuQ2> {
    let q = tensors.params.q();
    let q2 = q * q;
    let n_op = SparseOperator::linear_combination(&[(re(1.0), w), (re(q2 * (1.0 - q2)), &l[THREE])])?;
    let halo = n_op.halo();
    let interior = basis.interior_indices(halo);
    let mut mask = vec![false; basis.dim()];
    for &i in &interior {
        mask[i] = true;
    }
    let diag = n_op.diag();
    let scale = interior.iter().map(|&i| diag[i].norm()).fold(1.0, f64::max);
    let off = n_op.restricted_offdiag(&mask);
    if off > 1e-10 * scale
        || interior
            .iter()
            .any(|&i| diag[i].re <= 0.0 || diag[i].im.abs() > 1e-10 * scale)
    {
        return Err(Error::NotDiagonal {
            name: "W + q^2(1-q^2)L3".into(),
            offdiag: off,
        });
    }
    // Outside the interior N is not exact; there the inverse is set to zero so
    // that no spurious growth enters T.
    let n_d: Vec<f64> = diag.iter().map(|v| v.re).collect();
    let inv: Vec<Complex64> = n_d.iter().map(|&x| re(if x > 0.0 { 1.0 / x } else { 0.0 })).collect();
    let inv2: Vec<Complex64> = inv.iter().map(|x| x * x).collect();
    let nn: Vec<Complex64> = n_d.iter().map(|&x| re(x)).collect();
    let tau_half = SparseOperator::diagonal("tau^1/2", &inv).with_halo(halo);
    let tau = SparseOperator::diagonal("tau", &inv2).with_halo(halo);
    let tau_neg_half = SparseOperator::diagonal("tau^-1/2", &nn).with_halo(halo);
    let s1 = (1.0 + q2).sqrt();
    let t_plus = tau_half
        .matmul(&l[PLUS])?
        .scale_re(q2 * s1)
        .named("T+")
        .with_signature(ShiftSignature::new(&[0], &[1], &[0], &[0]));
    let t_minus = tau_half
        .matmul(&l[MINUS])?
        .scale_re(-q2 * q * s1)
        .named("T-")
        .with_signature(ShiftSignature::new(&[0], &[-1], &[0], &[0]));
    Ok(SuQ2 {
        t_plus,
        t_minus,
        tau,
        tau_half,
        tau_neg_half,
    })
}

// ---------------------------------------------------------------------------
// The complete operator set
// ---------------------------------------------------------------------------

/// Options for [`OperatorSet::build`].
#[derive(Debug, Clone, Default)]
pub struct BuildOptions {
    /// Light-cone phases `α_n` of `Λ^{1/2}`, indexed from the window's `n_lo`.
    pub light_phases: Vec<f64>,
}

/// Every generator of the algebra on one truncated sector.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub params: DeformationParams,
    pub tensors: Tensors,
    pub basis: BasisMap,
    pub x: [SparseOperator; 3],
    pub x0: SparseOperator,
    pub xcircx: SparseOperator,
    pub r: [SparseOperator; 3],
    pub s: [SparseOperator; 3],
    pub u: SparseOperator,
    pub lam_half: SparseOperator,
    pub lam_neg_half: SparseOperator,
    /// `P^A`, absent on the light cone.
    pub p: Option<[SparseOperator; 3]>,
    /// `P⁰`, absent on the light cone.
    pub p0: Option<SparseOperator>,
    pub v: Vec<Vec<SparseOperator>>,
    pub l: [SparseOperator; 3],
    pub w: SparseOperator,
    pub su: SuQ2,
}

impl OperatorSet {
    /// Builds the basis and every generator for one sector.
    pub fn build(p: &DeformationParams, sector: Sector, window: TruncationWindow, opts: &BuildOptions) -> Result<Self> {
        let basis = enumerate_basis(sector, window)?;
        let tensors = Tensors::new(p);
        let x = assemble_vector_operator(p, &reduced_x_table(&sector, p, &basis), &basis)?;
        let (x0, xcircx) = diag_x0_xcircx(&sector, p, &basis);
        let r = assemble_vector_operator(p, &reduced_r_table(&sector, p, &basis), &basis)?;
        let s = match sector.kind {
            SectorKind::LightLike => s_from_conjugation(p, &r),
            _ => assemble_vector_operator(p, &reduced_s_table(&sector, p, &basis)?, &basis)?,
        };
        let u = build_u(&sector, p, &basis);
        let (lam_half, lam_neg_half) = build_lambda(&sector, p, &basis, &opts.light_phases);
        let (pv, p0) = if sector.kind == SectorKind::LightLike {
            (None, None)
        } else {
            (
                Some(assemble_vector_operator(
                    p,
                    &reduced_p_table(&sector, p, &basis)?,
                    &basis,
                )?),
                Some(build_p0(&sector, p, &basis)?),
            )
        };
        let v = build_v(&tensors, &r, &s)?;
        let (l, w) = build_l_w(&tensors, &r, &s, &u)?;
        let su = build_t(&tensors, &l, &w, &basis)?;
        Ok(Self {
            params: *p,
            tensors,
            basis,
            x,
            x0,
            xcircx,
            r,
            s,
            u,
            lam_half,
            lam_neg_half,
            p: pv,
            p0,
            v,
            l,
            w,
            su,
        })
    }

    pub fn sector(&self) -> Sector {
        self.basis.sector()
    }

    /// All named generators, for dumps and audits.
    pub fn named_operators(&self) -> Vec<&SparseOperator> {
        let mut v: Vec<&SparseOperator> = Vec::new();
        v.extend(self.x.iter());
        v.push(&self.x0);
        v.push(&self.xcircx);
        v.extend(self.r.iter());
        v.extend(self.s.iter());
        v.push(&self.u);
        v.push(&self.lam_half);
        v.push(&self.lam_neg_half);
        if let (Some(pv), Some(p0)) = (&self.p, &self.p0) {
            v.extend(pv.iter());
            v.push(p0);
        }
        v.extend(self.l.iter());
        v.push(&self.w);
        v.push(&self.su.t_plus);
        v.push(&self.su.t_minus);
        v.push(&self.su.tau);
        v
    }

    /// Looks up a generator by name (`X+`, `X-`, `X3`, `X0`, `R+`, …, `U`,
    /// `Lambda`, `P0`, `L3`, `W`, `T+`, `tau`, …).
    pub fn operator(&self, name: &str) -> Result<&SparseOperator> {
        let alias = match name {
            "Lambda" | "Lam" | "Lambda^1/2" => "Lam^1/2",
            "Lambda^-1/2" => "Lam^-1/2",
            "XX" | "XcircX" => "XoX",
            other => other,
        };
        self.named_operators()
            .into_iter()
            .find(|o| o.name() == alias)
            .ok_or_else(|| Error::MissingGenerator(name.to_string()))
    }

    /// Checks every generator against its declared shift signature: exactly
    /// for generators read off closed formulas, on the exact interior for
    /// derived ones.
    pub fn audit_signatures(&self) -> Result<()> {
        for o in self.named_operators() {
            if o.halo() == ShiftBudget::ZERO {
                o.audit_signature(&self.basis, None, 0.0)?;
            } else {
                let mut mask = vec![false; self.basis.dim()];
                for i in self.basis.interior_indices(o.halo()) {
                    mask[i] = true;
                }
                let tol = 1e-10 * (1.0 + o.max_abs());
                o.audit_signature(&self.basis, Some(&mask), tol)?;
            }
        }
        Ok(())
    }
}
