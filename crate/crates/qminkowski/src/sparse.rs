//! Compressed-row sparse complex matrices with quantum-number bookkeeping.
//!
//! Every generator of the algebra is a [`SparseOperator`] on a fixed
//! [`BasisMap`](crate::hilbert::BasisMap).  Besides the matrix itself an
//! operator records
//!
//! * its [`ShiftSignature`], the quantum-number changes its matrix elements are
//!   allowed to realise, and
//! * its *halo*, the distance from the truncation boundary beyond which its
//!   matrix elements are exact.  Operators read off closed formulas have an
//!   empty halo; operators assembled from products of truncated generators
//!   (rotations, SU_q(2) generators) inherit the reach of those products.

use crate::error::{Error, Result};
use crate::hilbert::{BasisMap, ShiftBudget};
use num_complex::Complex64;
use serde::Serialize;
use std::ops::{Add, Mul, Neg, Sub};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Allowed changes `(Δj, Δm, Δn, ΔM)` of a matrix element `⟨row|O|col⟩`,
/// stated as a product of per-quantum-number sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShiftSignature {
    pub dj: Vec<i64>,
    pub dm: Vec<i64>,
    pub dn: Vec<i64>,
    pub dlevel: Vec<i64>,
}

impl ShiftSignature {
    pub fn new(dj: &[i64], dm: &[i64], dn: &[i64], dlevel: &[i64]) -> Self {
        Self {
            dj: dj.to_vec(),
            dm: dm.to_vec(),
            dn: dn.to_vec(),
            dlevel: dlevel.to_vec(),
        }
    }

    /// Diagonal in every quantum number.
    pub fn diagonal() -> Self {
        Self::new(&[0], &[0], &[0], &[0])
    }

    /// Whether the change `(Δj, Δm, Δn, ΔM)` is allowed.
    pub fn allows(&self, dj: i64, dm: i64, dn: i64, dlevel: i64) -> bool {
        self.dj.contains(&dj) && self.dm.contains(&dm) && self.dn.contains(&dn) && self.dlevel.contains(&dlevel)
    }

    /// Largest absolute change per quantum number.
    pub fn reach(&self) -> ShiftBudget {
        let m = |v: &[i64]| v.iter().map(|x| x.abs()).max().unwrap_or(0);
        ShiftBudget::new(m(&self.dj), m(&self.dn), m(&self.dlevel))
    }

    fn sumset(a: &[i64], b: &[i64]) -> Vec<i64> {
        let mut v: Vec<i64> = a.iter().flat_map(|x| b.iter().map(move |y| x + y)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    fn union(a: &[i64], b: &[i64]) -> Vec<i64> {
        let mut v: Vec<i64> = a.iter().chain(b).copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Signature of a product `A·B` (changes add).
    pub fn compose(&self, o: &Self) -> Self {
        Self {
            dj: Self::sumset(&self.dj, &o.dj),
            dm: Self::sumset(&self.dm, &o.dm),
            dn: Self::sumset(&self.dn, &o.dn),
            dlevel: Self::sumset(&self.dlevel, &o.dlevel),
        }
    }

    /// A signature covering both `self` and `o`.
    pub fn join(&self, o: &Self) -> Self {
        Self {
            dj: Self::union(&self.dj, &o.dj),
            dm: Self::union(&self.dm, &o.dm),
            dn: Self::union(&self.dn, &o.dn),
            dlevel: Self::union(&self.dlevel, &o.dlevel),
        }
    }

    /// Signature of the adjoint (changes flip sign).
    pub fn reversed(&self) -> Self {
        let neg = |v: &[i64]| {
            let mut w: Vec<i64> = v.iter().map(|x| -x).collect();
            w.sort_unstable();
            w
        };
        Self {
            dj: neg(&self.dj),
            dm: neg(&self.dm),
            dn: neg(&self.dn),
            dlevel: neg(&self.dlevel),
        }
    }
}

/// A named, immutable sparse complex matrix in CSR layout.
#[derive(Debug, Clone)]
pub struct SparseOperator {
    name: String,
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
    signature: ShiftSignature,
    halo: ShiftBudget,
}

impl SparseOperator {
    /// Builds an operator from `(row, col, value)` triplets; duplicates are
    /// summed and exact zeros dropped.
    pub fn from_triplets(
        name: impl Into<String>,
        dim: usize,
        mut triplets: Vec<(usize, usize, Complex64)>,
        signature: ShiftSignature,
    ) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<Complex64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < dim && c < dim, "entry ({r}, {c}) outside dimension {dim}");
            if last == Some((r, c)) {
                *vals.last_mut().expect("previous entry exists") += v;
                continue;
            }
            last = Some((r, c));
            row_ptr[r + 1] += 1;
            cols.push(c);
            vals.push(v);
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            name: name.into(),
            dim,
            row_ptr,
            cols,
            vals,
            signature,
            halo: ShiftBudget::ZERO,
        }
        .pruned()
    }

    /// The zero operator.
    pub fn zeros(dim: usize) -> Self {
        Self::from_triplets("0", dim, Vec::new(), ShiftSignature::diagonal())
    }

    /// The identity.
    pub fn identity(dim: usize) -> Self {
        Self::diagonal("1", &vec![Complex64::new(1.0, 0.0); dim])
    }

    /// A diagonal operator.
    pub fn diagonal(name: impl Into<String>, d: &[Complex64]) -> Self {
        let t = d.iter().enumerate().map(|(i, v)| (i, i, *v)).collect();
        Self::from_triplets(name, d.len(), t, ShiftSignature::diagonal())
    }

    fn pruned(mut self) -> Self {
        if self.vals.iter().all(|v| *v != ZERO) {
            return self;
        }
        let mut row_ptr = vec![0usize; self.dim + 1];
        let mut cols = Vec::with_capacity(self.cols.len());
        let mut vals = Vec::with_capacity(self.vals.len());
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.vals[k] != ZERO {
                    cols.push(self.cols[k]);
                    vals.push(self.vals[k]);
                }
            }
            row_ptr[r + 1] = cols.len();
        }
        self.row_ptr = row_ptr;
        self.cols = cols;
        self.vals = vals;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// The same operator under a new name.
    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// The same operator with a declared shift signature.
    pub fn with_signature(mut self, s: ShiftSignature) -> Self {
        self.signature = s;
        self
    }

    /// The same operator with a declared halo.
    pub fn with_halo(mut self, h: ShiftBudget) -> Self {
        self.halo = h;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn signature(&self) -> &ShiftSignature {
        &self.signature
    }

    pub fn halo(&self) -> ShiftBudget {
        self.halo
    }

    /// Entries `(row, col, value)` of one row.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (self.cols[k], self.vals[k]))
    }

    /// All stored entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    /// Matrix element `⟨row|O|col⟩`.
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let s = &self.cols[self.row_ptr[r]..self.row_ptr[r + 1]];
        match s.binary_search(&c) {
            Ok(k) => self.vals[self.row_ptr[r] + k],
            Err(_) => ZERO,
        }
    }

    /// Diagonal entries.
    pub fn diag(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// `c · O`.
    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for v in &mut out.vals {
            *v *= c;
        }
        out.pruned()
    }

    /// `c · O` for real `c`.
    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let t = self.iter().map(|(r, c, v)| (c, r, v.conj())).collect();
        let mut out = Self::from_triplets(format!("adj({})", self.name), self.dim, t, self.signature.reversed());
        out.halo = self.halo;
        out
    }

    /// `Σ_k c_k O_k`; all operands must share the dimension.
    pub fn linear_combination(terms: &[(Complex64, &SparseOperator)]) -> Result<Self> {
        let dim = terms.first().map(|t| t.1.dim).unwrap_or(0);
        if let Some(t) = terms.iter().find(|t| t.1.dim != dim) {
            return Err(Error::BasisMismatch(format!(
                "cannot add {} (dim {}) to an operator of dim {dim}",
                t.1.name, t.1.dim
            )));
        }
        let mut sig: Option<ShiftSignature> = None;
        let mut halo = ShiftBudget::ZERO;
        let mut trip = Vec::new();
        for (c, o) in terms {
            if *c == ZERO {
                continue;
            }
            trip.extend(o.iter().map(|(r, cc, v)| (r, cc, v * c)));
            sig = Some(match sig {
                None => o.signature.clone(),
                Some(s) => s.join(&o.signature),
            });
            halo = halo.max(o.halo);
        }
        let mut out = Self::from_triplets("sum", dim, trip, sig.unwrap_or_else(ShiftSignature::diagonal));
        out.halo = halo;
        Ok(out)
    }

    /// Matrix product `self · o`.
    pub fn matmul(&self, o: &SparseOperator) -> Result<Self> {
        if self.dim != o.dim {
            return Err(Error::BasisMismatch(format!(
                "cannot multiply {} (dim {}) by {} (dim {})",
                self.name, self.dim, o.name, o.dim
            )));
        }
        let n = self.dim;
        let mut acc = vec![ZERO; n];
        let mut seen = vec![false; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for r in 0..n {
            for (k, a) in self.row(r) {
                for (c, b) in o.row(k) {
                    if !seen[c] {
                        seen[c] = true;
                        touched.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                if acc[c] != ZERO {
                    cols.push(c);
                    vals.push(acc[c]);
                }
                acc[c] = ZERO;
                seen[c] = false;
            }
            touched.clear();
            row_ptr[r + 1] = cols.len();
        }
        let reach = self.signature.reach();
        Ok(Self {
            name: format!("{}*{}", self.name, o.name),
            dim: n,
            row_ptr,
            cols,
            vals,
            signature: self.signature.compose(&o.signature),
            halo: self.halo.max(reach.plus(o.halo)),
        })
    }

    /// `self · o − o · self`.
    pub fn commutator(&self, o: &SparseOperator) -> Result<Self> {
        let one = Complex64::new(1.0, 0.0);
        Self::linear_combination(&[(one, &self.matmul(o)?), (-one, &o.matmul(self)?)])
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest entry modulus and Frobenius norm restricted to rows and columns
    /// in `mask`.
    pub fn restricted_norms(&self, mask: &[bool]) -> (f64, f64) {
        let mut mx: f64 = 0.0;
        let mut fro = 0.0;
        for r in 0..self.dim {
            if !mask[r] {
                continue;
            }
            for (c, v) in self.row(r) {
                if mask[c] {
                    let a = v.norm();
                    mx = mx.max(a);
                    fro += a * a;
                }
            }
        }
        (mx, fro.sqrt())
    }

    /// Largest off-diagonal modulus restricted to rows and columns in `mask`.
    pub fn restricted_offdiag(&self, mask: &[bool]) -> f64 {
        self.iter()
            .filter(|(r, c, _)| r != c && mask[*r] && mask[*c])
            .map(|(_, _, v)| v.norm())
            .fold(0.0, f64::max)
    }

    /// Checks every stored entry whose row lies in `rows` against the declared
    /// shift signature.  Returns the first violation.
    pub fn audit_signature(&self, basis: &BasisMap, rows: Option<&[bool]>, tol: f64) -> Result<()> {
        if basis.dim() != self.dim {
            return Err(Error::BasisMismatch(format!(
                "{} has dim {} but the basis has {}",
                self.name,
                self.dim,
                basis.dim()
            )));
        }
        for (r, c, v) in self.iter() {
            if rows.is_some_and(|m| !m[r] || !m[c]) || v.norm() <= tol {
                continue;
            }
            let (a, b) = (basis.label(r), basis.label(c));
            if !self
                .signature
                .allows(a.j - b.j, a.m - b.m, a.n - b.n, a.level - b.level)
            {
                return Err(Error::ShiftSignature {
                    name: self.name.clone(),
                    row: r,
                    col: c,
                });
            }
        }
        Ok(())
    }

    /// Dense copy, row-major; intended for small matrices and tests.
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let mut d = vec![vec![ZERO; self.dim]; self.dim];
        for (r, c, v) in self.iter() {
            d[r][c] = v;
        }
        d
    }
}

impl Add for &SparseOperator {
    type Output = SparseOperator;
    fn add(self, o: &SparseOperator) -> SparseOperator {
        let one = Complex64::new(1.0, 0.0);
        SparseOperator::linear_combination(&[(one, self), (one, o)]).expect("operands share a basis")
    }
}

impl Sub for &SparseOperator {
    type Output = SparseOperator;
    fn sub(self, o: &SparseOperator) -> SparseOperator {
        let one = Complex64::new(1.0, 0.0);
        SparseOperator::linear_combination(&[(one, self), (-one, o)]).expect("operands share a basis")
    }
}

impl Mul for &SparseOperator {
    type Output = SparseOperator;
    fn mul(self, o: &SparseOperator) -> SparseOperator {
        self.matmul(o).expect("operands share a basis")
    }
}

impl Mul<&SparseOperator> for Complex64 {
    type Output = SparseOperator;
    fn mul(self, o: &SparseOperator) -> SparseOperator {
        o.scale(self)
    }
}

impl Mul<&SparseOperator> for f64 {
    type Output = SparseOperator;
    fn mul(self, o: &SparseOperator) -> SparseOperator {
        o.scale_re(self)
    }
}

impl Neg for &SparseOperator {
    type Output = SparseOperator;
    fn neg(self) -> SparseOperator {
        self.scale_re(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn small() -> SparseOperator {
        SparseOperator::from_triplets(
            "A",
            3,
            vec![
                (0, 1, c(1.0, 2.0)),
                (2, 0, c(-3.0, 0.0)),
                (0, 1, c(1.0, 0.0)),
                (1, 1, c(0.0, 0.0)),
            ],
            ShiftSignature::diagonal(),
        )
    }

    #[test]
    fn duplicates_summed_and_zeros_dropped() {
        let a = small();
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.get(0, 1), c(2.0, 2.0));
        assert_eq!(a.get(1, 1), c(0.0, 0.0));
    }

    #[test]
    fn product_matches_dense() {
        let a = small();
        let b = a.adjoint();
        let p = &a * &b;
        let (da, db) = (a.to_dense(), b.to_dense());
        for i in 0..3 {
            for j in 0..3 {
                let e: Complex64 = (0..3).map(|k| da[i][k] * db[k][j]).sum();
                assert_eq!(p.get(i, j), e);
            }
        }
    }

    #[test]
    fn adjoint_is_involution() {
        let a = small();
        let aa = a.adjoint().adjoint();
        assert_eq!(a.to_dense(), aa.to_dense());
    }

    #[test]
    fn mismatched_dimensions_error() {
        let a = SparseOperator::identity(3);
        let b = SparseOperator::identity(4);
        assert!(a.matmul(&b).is_err());
        assert!(SparseOperator::linear_combination(&[(c(1.0, 0.0), &a), (c(1.0, 0.0), &b)]).is_err());
    }

    #[test]
    fn signature_composition() {
        let xp = ShiftSignature::new(&[-1, 0, 1], &[1], &[0], &[0]);
        let xm = ShiftSignature::new(&[-1, 0, 1], &[-1], &[0], &[0]);
        let s = xp.compose(&xm);
        assert_eq!(s.dj, vec![-2, -1, 0, 1, 2]);
        assert_eq!(s.dm, vec![0]);
        assert_eq!(xp.reversed().dm, vec![-1]);
    }
}
