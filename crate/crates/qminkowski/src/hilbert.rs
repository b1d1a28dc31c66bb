//! Sectors, basis enumeration, truncation windows and the admissible
//! `(t, r)` lattice.
//!
//! States are labelled `|j, m, n, M⟩`: `j, m` are the SU_q(2) quantum numbers
//! (integer `j ≥ 0`, integer `m ∈ [−j, j]`), `n` enumerates the eigenvalues of
//! `X⁰` along one hyperboloid, and `M` labels the hyperboloid via the scaling
//! operator (`s = t₀ q^M`, `l = l₀ q^M`).  On the light cone there is no `M`;
//! it is stored as `0` throughout.

use crate::error::{Error, Result};
use crate::qnum::DeformationParams;
use serde::Serialize;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

/// The four families of representations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SectorKind {
    /// `s² < 0`.
    SpaceLike,
    /// `s² > 0`, `t₀ > 0`.
    TimeLikeForward,
    /// `s² > 0`, `t₀ < 0`.
    TimeLikeBackward,
    /// `s² = 0`.
    LightLike,
}

impl SectorKind {
    pub const ALL: [SectorKind; 4] = [
        SectorKind::SpaceLike,
        SectorKind::TimeLikeForward,
        SectorKind::TimeLikeBackward,
        SectorKind::LightLike,
    ];

    /// Short tag used on the command line and in reports.
    pub fn tag(&self) -> &'static str {
        match self {
            SectorKind::SpaceLike => "space",
            SectorKind::TimeLikeForward => "time+",
            SectorKind::TimeLikeBackward => "time-",
            SectorKind::LightLike => "light",
        }
    }

    pub fn is_time_like(&self) -> bool {
        matches!(self, SectorKind::TimeLikeForward | SectorKind::TimeLikeBackward)
    }

    /// Whether states carry a scale level `M`.
    pub fn has_levels(&self) -> bool {
        !matches!(self, SectorKind::LightLike)
    }
}

impl fmt::Display for SectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for SectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "space" => Ok(SectorKind::SpaceLike),
            "time+" => Ok(SectorKind::TimeLikeForward),
            "time-" => Ok(SectorKind::TimeLikeBackward),
            "light" => Ok(SectorKind::LightLike),
            other => Err(Error::InvalidParameter(format!(
                "unknown sector '{other}' (expected space, time+, time- or light)"
            ))),
        }
    }
}

/// A sector together with its representation label.
///
/// `scale` is `l₀` (space-like), `|t₀|` (time-like) or `τ₀` (light-like).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sector {
    pub kind: SectorKind,
    pub scale: f64,
}

impl Sector {
    /// Validates `scale ∈ [1, q)` for space- and time-like sectors and
    /// `scale > 0` on the light cone.
    pub fn new(kind: SectorKind, scale: f64, p: &DeformationParams) -> Result<Self> {
        if !scale.is_finite() || scale <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "sector scale must be positive, got {scale}"
            )));
        }
        if kind != SectorKind::LightLike && !(1.0..p.q()).contains(&scale) {
            return Err(Error::InvalidParameter(format!(
                "sector scale for {kind} must lie in [1, q) = [1, {}), got {scale}",
                p.q()
            )));
        }
        Ok(Self { kind, scale })
    }

    /// `+1` except for the backward time-like sector.
    pub fn sign(&self) -> f64 {
        if self.kind == SectorKind::TimeLikeBackward {
            -1.0
        } else {
            1.0
        }
    }

    /// The signed representation label (`t₀` including its sign).
    pub fn signed_scale(&self) -> f64 {
        self.sign() * self.scale
    }

    /// Signed hyperboloid scale `s = t₀ q^M` (or `l = l₀ q^M`) at level `M`.
    pub fn level_scale(&self, level: i64, p: &DeformationParams) -> f64 {
        match self.kind {
            SectorKind::LightLike => self.scale,
            _ => self.signed_scale() * p.powi(level),
        }
    }

    /// Invariant length `s² = t² − r²` at level `M`.
    pub fn invariant_length(&self, level: i64, p: &DeformationParams) -> f64 {
        let s = self.level_scale(level, p);
        match self.kind {
            SectorKind::SpaceLike => -s * s,
            SectorKind::LightLike => 0.0,
            _ => s * s,
        }
    }

    /// The eigenvalues `(t, r²)` of `X⁰` and `X∘X` on `|·, ·, n, M⟩`.
    pub fn point(&self, n: i64, level: i64, p: &DeformationParams) -> (f64, f64) {
        let lam = p.lambda();
        let b2 = p.br(2);
        match self.kind {
            SectorKind::SpaceLike => {
                let l = self.level_scale(level, p);
                (l * lam * p.br(n) / b2, l * l * p.cu(n + 1) * p.cu(n - 1) / (b2 * b2))
            }
            SectorKind::TimeLikeForward | SectorKind::TimeLikeBackward => {
                let s = self.level_scale(level, p);
                (
                    s * p.cu(n + 1) / b2,
                    s * s * lam * lam * p.br(n + 2) * p.br(n) / (b2 * b2),
                )
            }
            SectorKind::LightLike => {
                let t = self.scale * p.powi(n);
                (t, t * t)
            }
        }
    }

    /// Whether `(j, n)` satisfies the sector constraints (`j ≥ 0`; time-like
    /// additionally `n ≥ 0`, `j ≤ n`).
    pub fn admissible(&self, j: i64, n: i64) -> bool {
        if j < 0 {
            return false;
        }
        if self.kind.is_time_like() {
            return n >= 0 && j <= n;
        }
        true
    }
}

/// A basis label `|j, m, n, M⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BasisLabel {
    pub j: i64,
    pub m: i64,
    pub n: i64,
    /// The scale level `M` (always 0 on the light cone).
    pub level: i64,
}

impl BasisLabel {
    pub fn new(j: i64, m: i64, n: i64, level: i64) -> Self {
        Self { j, m, n, level }
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|j={},m={},n={},M={}>", self.j, self.m, self.n, self.level)
    }
}

/// Finite truncation of the basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TruncationWindow {
    pub j_max: i64,
    pub n_lo: i64,
    pub n_hi: i64,
    /// Lowest scale level `M` (ignored on the light cone).
    pub level_lo: i64,
    /// Highest scale level `M` (ignored on the light cone).
    pub level_hi: i64,
    /// Extra uniform margin added to every interior shift budget.
    pub margin: i64,
}

impl TruncationWindow {
    pub fn new(j_max: i64, n: (i64, i64), levels: (i64, i64), margin: i64) -> Result<Self> {
        let w = Self {
            j_max,
            n_lo: n.0,
            n_hi: n.1,
            level_lo: levels.0,
            level_hi: levels.1,
            margin,
        };
        w.validate()?;
        Ok(w)
    }

    /// The default desk-scale window for a sector: `j_max = 5`,
    /// `n ∈ [−8, 8]` (space- and light-like) or `[0, 12]` (time-like),
    /// `M ∈ [−4, 4]`.
    pub fn default_for(kind: SectorKind) -> Self {
        let (n_lo, n_hi) = if kind.is_time_like() { (0, 12) } else { (-8, 8) };
        let (level_lo, level_hi) = if kind.has_levels() { (-4, 4) } else { (0, 0) };
        Self {
            j_max: 5,
            n_lo,
            n_hi,
            level_lo,
            level_hi,
            margin: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.j_max < 0 || self.n_lo > self.n_hi || self.level_lo > self.level_hi || self.margin < 0 {
            return Err(Error::InvalidParameter(format!("malformed truncation window {self:?}")));
        }
        Ok(())
    }

    fn contains(&self, kind: SectorKind, j: i64, n: i64, level: i64) -> bool {
        let level_ok = !kind.has_levels() || (self.level_lo..=self.level_hi).contains(&level);
        j <= self.j_max && (self.n_lo..=self.n_hi).contains(&n) && level_ok
    }
}

/// Per-quantum-number reach of an operator expression, used to decide which
/// states are far enough from the truncation boundary.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
pub struct ShiftBudget {
    pub j: i64,
    pub n: i64,
    pub level: i64,
}

impl ShiftBudget {
    pub const ZERO: ShiftBudget = ShiftBudget { j: 0, n: 0, level: 0 };

    pub fn new(j: i64, n: i64, level: i64) -> Self {
        Self { j, n, level }
    }

    /// Component-wise sum.
    pub fn plus(self, o: ShiftBudget) -> Self {
        Self::new(self.j + o.j, self.n + o.n, self.level + o.level)
    }

    /// Component-wise maximum.
    pub fn max(self, o: ShiftBudget) -> Self {
        Self::new(self.j.max(o.j), self.n.max(o.n), self.level.max(o.level))
    }

    /// Adds the same amount to every component.
    pub fn widen(self, by: i64) -> Self {
        self.plus(Self::new(by, by, by))
    }
}

/// The ordered basis of a truncated sector and its label ↔ index bijection.
#[derive(Debug, Clone)]
pub struct BasisMap {
    sector: Sector,
    window: TruncationWindow,
    labels: Vec<BasisLabel>,
    index: HashMap<BasisLabel, usize>,
}

/// Enumerates all admissible labels inside the window, lexicographically in
/// `(M, n, j, m)`.
pub fn enumerate_basis(sector: Sector, window: TruncationWindow) -> Result<BasisMap> {
    window.validate()?;
    let levels = if sector.kind.has_levels() {
        window.level_lo..=window.level_hi
    } else {
        0..=0
    };
    let mut labels = Vec::new();
    for level in levels {
        for n in window.n_lo..=window.n_hi {
            for j in 0..=window.j_max {
                if !sector.admissible(j, n) {
                    continue;
                }
                for m in -j..=j {
                    labels.push(BasisLabel::new(j, m, n, level));
                }
            }
        }
    }
    if labels.is_empty() {
        return Err(Error::EmptyWindow(sector.kind.to_string()));
    }
    let index = labels.iter().enumerate().map(|(i, l)| (*l, i)).collect();
    Ok(BasisMap {
        sector,
        window,
        labels,
        index,
    })
}

impl BasisMap {
    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn window(&self) -> TruncationWindow {
        self.window
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[BasisLabel] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> BasisLabel {
        self.labels[i]
    }

    /// Dense index of a label, if it is part of the truncated basis.
    pub fn index_of(&self, l: &BasisLabel) -> Option<usize> {
        self.index.get(l).copied()
    }

    /// Whether two maps describe the same basis.
    pub fn same_as(&self, other: &BasisMap) -> bool {
        self.sector == other.sector && self.window == other.window
    }

    /// Indices whose labels keep every admissible shifted label
    /// `(j+δj, n+δn, M+δM)`, `|δ| ≤ budget + margin`, inside the window.
    ///
    /// Shifted labels that violate the sector constraints are ignored: matrix
    /// elements into them vanish identically, so they cannot be corrupted by
    /// the truncation.
    pub fn interior_indices(&self, budget: ShiftBudget) -> Vec<usize> {
        let b = budget.widen(self.window.margin);
        let kind = self.sector.kind;
        let bl = if kind.has_levels() { b.level } else { 0 };
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, l)| {
                for dj in -b.j..=b.j {
                    for dn in -b.n..=b.n {
                        for dl in -bl..=bl {
                            let (j, n, level) = (l.j + dj, l.n + dn, l.level + dl);
                            if self.sector.admissible(j, n) && !self.window.contains(kind, j, n, level) {
                                return false;
                            }
                        }
                    }
                }
                true
            })
            .map(|(i, _)| i)
            .collect()
    }
}

/// One admissible `(t, r)` point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumPoint {
    pub sector: SectorKind,
    pub n: i64,
    #[serde(rename = "M")]
    pub level: i64,
    pub t: f64,
    pub r: f64,
}

/// All lattice points for `n ∈ n_range`, `M ∈ level_range` (the level range is
/// ignored on the light cone).
pub fn spectrum_points(
    sector: Sector,
    p: &DeformationParams,
    n_range: (i64, i64),
    level_range: (i64, i64),
) -> Result<Vec<SpectrumPoint>> {
    if sector.kind.is_time_like() && n_range.0 < 0 {
        return Err(Error::InvalidParameter(format!(
            "time-like sectors require n >= 0, got n from {}",
            n_range.0
        )));
    }
    let levels = if sector.kind.has_levels() {
        level_range.0..=level_range.1
    } else {
        0..=0
    };
    let mut out = Vec::new();
    for level in levels {
        for n in n_range.0..=n_range.1 {
            let (t, r2) = sector.point(n, level, p);
            out.push(SpectrumPoint {
                sector: sector.kind,
                n,
                level,
                t,
                r: r2.max(0.0).sqrt(),
            });
        }
    }
    Ok(out)
}

/// Residual of the adjacency condition between the lattice point `(t′, r′)`
/// and the value `t` reached from it,
///
/// `(t − 2t′/[2])(t − {2}t′/[2]) − λ²r′²/[2]²`,
///
/// together with the consistency `r′² = t′² − s²`.  Both parts are divided by
/// `max(1, t′²)`; the larger one is returned.  The residual vanishes exactly
/// when `t` is one of the two neighbours of `t′` on the hyperboloid `s²`.
pub fn check_spectral_condition(t: f64, t_prime: f64, r_prime: f64, s2: f64, p: &DeformationParams) -> f64 {
    let b2 = p.br(2);
    let lam = p.lambda();
    let rp2 = r_prime * r_prime;
    let quad = (t - 2.0 / b2 * t_prime) * (t - p.cu(2) / b2 * t_prime) - lam * lam / (b2 * b2) * rp2;
    let hyper = rp2 - (t_prime * t_prime - s2);
    let norm = t_prime.powi(2).max(1.0);
    (quad.abs() / norm).max(hyper.abs() / norm)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> DeformationParams {
        DeformationParams::new(1.1).unwrap()
    }

    #[test]
    fn sector_scale_validation() {
        let p = p();
        assert!(Sector::new(SectorKind::SpaceLike, 1.0, &p).is_ok());
        assert!(Sector::new(SectorKind::SpaceLike, 1.1, &p).is_err());
        assert!(Sector::new(SectorKind::TimeLikeBackward, 0.9, &p).is_err());
        assert!(Sector::new(SectorKind::LightLike, 7.0, &p).is_ok());
        assert!(Sector::new(SectorKind::LightLike, 0.0, &p).is_err());
    }

    #[test]
    fn parse_tags_roundtrip() {
        for k in SectorKind::ALL {
            assert_eq!(k.tag().parse::<SectorKind>().unwrap(), k);
        }
        assert!("tachyon".parse::<SectorKind>().is_err());
    }

    #[test]
    fn time_like_small_window_by_hand() {
        let p = p();
        let s = Sector::new(SectorKind::TimeLikeForward, 1.0, &p).unwrap();
        let b = enumerate_basis(s, TruncationWindow::new(1, (0, 1), (0, 0), 0).unwrap()).unwrap();
        let expect = [(0, 0, 0), (0, 0, 1), (1, -1, 1), (1, 0, 1), (1, 1, 1)];
        assert_eq!(b.dim(), 5);
        for (l, (j, m, n)) in b.labels().iter().zip(expect) {
            assert_eq!((l.j, l.m, l.n, l.level), (j, m, n, 0));
        }
    }

    #[test]
    fn space_and_light_sizes() {
        let p = p();
        let s = Sector::new(SectorKind::SpaceLike, 1.0, &p).unwrap();
        let b = enumerate_basis(s, TruncationWindow::new(0, (-1, 1), (0, 0), 0).unwrap()).unwrap();
        assert_eq!(b.dim(), 3);
        let l = Sector::new(SectorKind::LightLike, 1.0, &p).unwrap();
        let b = enumerate_basis(l, TruncationWindow::new(0, (0, 2), (-3, 3), 0).unwrap()).unwrap();
        assert_eq!(b.dim(), 3);
        assert!(b.labels().iter().all(|x| x.level == 0));
    }

    #[test]
    fn empty_window_is_an_error() {
        let p = p();
        let s = Sector::new(SectorKind::TimeLikeForward, 1.0, &p).unwrap();
        let w = TruncationWindow::new(3, (-5, -1), (0, 0), 0).unwrap();
        assert!(matches!(enumerate_basis(s, w), Err(Error::EmptyWindow(_))));
    }

    #[test]
    fn interior_shrinks_n_interval() {
        let p = p();
        let s = Sector::new(SectorKind::SpaceLike, 1.0, &p).unwrap();
        let b = enumerate_basis(s, TruncationWindow::new(2, (-5, 5), (0, 0), 0).unwrap()).unwrap();
        assert_eq!(b.interior_indices(ShiftBudget::ZERO).len(), b.dim());
        let inner = b.interior_indices(ShiftBudget::new(0, 2, 0));
        assert!(!inner.is_empty());
        assert!(inner.iter().all(|&i| (-3..=3).contains(&b.label(i).n)));
        assert_eq!(inner.len(), 7 * 9);
    }

    #[test]
    fn apex_points() {
        let p = p();
        let t = Sector::new(SectorKind::TimeLikeForward, 1.0, &p).unwrap();
        let (t0, r2) = t.point(0, 0, &p);
        assert!((t0 - 1.0).abs() < 1e-15 && r2.abs() < 1e-15);
        let s = Sector::new(SectorKind::SpaceLike, 1.0, &p).unwrap();
        let (t0, r2) = s.point(0, 0, &p);
        assert!(t0.abs() < 1e-15 && (r2 - 1.0).abs() < 1e-14);
        let l = Sector::new(SectorKind::LightLike, 1.0, &p).unwrap();
        let (t3, r2) = l.point(3, 0, &p);
        assert!((t3 - 1.331).abs() < 1e-12 && (r2 - 1.331f64.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn apex_upward_link() {
        let p = p();
        let up = p.cu(2) / p.br(2);
        assert!(check_spectral_condition(up, 1.0, 0.0, 1.0, &p) < 1e-14);
        assert!(check_spectral_condition(0.5, 1.0, 0.0, 1.0, &p) > 1e-3);
    }

    #[test]
    fn consecutive_n_are_adjacent_in_every_sector() {
        for q in [1.1, 1.5] {
            let p = DeformationParams::new(q).unwrap();
            for kind in [
                SectorKind::SpaceLike,
                SectorKind::TimeLikeForward,
                SectorKind::TimeLikeBackward,
                SectorKind::LightLike,
            ] {
                let s = Sector::new(kind, 1.0, &p).unwrap();
                let n_lo = if kind.is_time_like() { 0 } else { -6 };
                for level in -2..=2 {
                    let s2 = s.invariant_length(level, &p);
                    for n in n_lo..6 {
                        let (t, r2) = s.point(n, level, &p);
                        let (tn, _) = s.point(n + 1, level, &p);
                        assert!(check_spectral_condition(tn, t, r2.sqrt(), s2, &p) < 1e-12);
                        // A point two steps away is not a neighbour.
                        let (tf, _) = s.point(n + 2, level, &p);
                        assert!(check_spectral_condition(tf, t, r2.sqrt(), s2, &p) > 1e-4);
                    }
                }
            }
        }
    }
}
