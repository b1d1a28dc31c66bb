//! Constant tensors: Euclidean and Minkowski metrics, the q-deformed
//! ε-tensors, the 3d R̂-matrix and the 4d projector decomposition.
//!
//! Component order is fixed crate-wide: the three space indices are
//! `(+, −, 3)` → `0, 1, 2`, and the Minkowski indices append the time index,
//! `(+, −, 3, 0)` → `0, 1, 2, 3`.  Four-index tensors `T^{ab}_{cd}` are stored
//! densely and viewed as matrices on index pairs, row `(a, b)` and column
//! `(c, d)`, each pair flattened row-major.

use crate::qnum::DeformationParams;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

/// Index of the `+` component.
pub const PLUS: usize = 0;
/// Index of the `−` component.
pub const MINUS: usize = 1;
/// Index of the `3` component.
pub const THREE: usize = 2;
/// Index of the time component in 4d.
pub const ZERO: usize = 3;

/// Human-readable component labels, in storage order.
pub const COMPONENT_LABELS: [&str; 4] = ["+", "-", "3", "0"];

/// Euclidean metric `g_AB` and its inverse `g^AB` (which has identical values).
#[derive(Debug, Clone, Serialize)]
pub struct Metric3 {
    /// Covariant components `g_AB`.
    pub lower: [[f64; 3]; 3],
    /// Contravariant components `g^AB`.
    pub upper: [[f64; 3]; 3],
}

impl Metric3 {
    pub fn new(p: &DeformationParams) -> Self {
        let q = p.q();
        let mut g = [[0.0; 3]; 3];
        g[PLUS][MINUS] = -q;
        g[MINUS][PLUS] = -1.0 / q;
        g[THREE][THREE] = 1.0;
        Self { lower: g, upper: g }
    }
}

/// The q-deformed ε-tensor in all index positions used by the algebra.
#[derive(Debug, Clone, Serialize)]
pub struct Epsilon3 {
    /// `ε_{AB}^C`, stored as `mixed[A][B][C]`.
    pub mixed: [[[f64; 3]; 3]; 3],
    /// `ε_{ABC} = g_{CD} ε_{AB}^D`.
    pub lower: [[[f64; 3]; 3]; 3],
    /// `ε^{ABC} = g^{AA'} g^{BB'} ε_{A'B'}^C`.
    pub upper: [[[f64; 3]; 3]; 3],
    /// `ε_C^{AB} = g^{AA'} ε_{CA'}^B`, stored as `left_lower[C][A][B]`.
    pub left_lower: [[[f64; 3]; 3]; 3],
}

impl Epsilon3 {
    pub fn new(p: &DeformationParams, g: &Metric3) -> Self {
        let q = p.q();
        let mut e = [[[0.0; 3]; 3]; 3];
        e[PLUS][MINUS][THREE] = q;
        e[MINUS][PLUS][THREE] = -q;
        e[THREE][THREE][THREE] = 1.0 - q * q;
        e[PLUS][THREE][PLUS] = 1.0;
        e[THREE][PLUS][PLUS] = -q * q;
        e[MINUS][THREE][MINUS] = -q * q;
        e[THREE][MINUS][MINUS] = 1.0;

        let mut lower = [[[0.0; 3]; 3]; 3];
        let mut upper = [[[0.0; 3]; 3]; 3];
        let mut left_lower = [[[0.0; 3]; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    lower[a][b][c] = (0..3).map(|d| g.lower[c][d] * e[a][b][d]).sum();
                    upper[a][b][c] = (0..3)
                        .flat_map(|a2| (0..3).map(move |b2| (a2, b2)))
                        .map(|(a2, b2)| g.upper[a][a2] * g.upper[b][b2] * e[a2][b2][c])
                        .sum();
                    // left_lower[C][A][B] = ε_C^{AB}
                    left_lower[a][b][c] = (0..3).map(|b2| g.upper[b][b2] * e[a][b2][c]).sum();
                }
            }
        }
        Self {
            mixed: e,
            lower,
            upper,
            left_lower,
        }
    }
}

/// Minkowski metric `η_ab` (and `η^ab`, which has identical values).
#[derive(Debug, Clone, Serialize)]
pub struct Metric4 {
    pub eta: [[f64; 4]; 4],
}

impl Metric4 {
    pub fn new(p: &DeformationParams) -> Self {
        let q = p.q();
        let mut eta = [[0.0; 4]; 4];
        eta[ZERO][ZERO] = -1.0;
        eta[THREE][THREE] = 1.0;
        eta[PLUS][MINUS] = -q;
        eta[MINUS][PLUS] = -1.0 / q;
        Self { eta }
    }
}

/// All constant tensors for a given `q`, built once and shared.
#[derive(Debug, Clone)]
pub struct Tensors {
    pub params: DeformationParams,
    pub g: Metric3,
    pub eps: Epsilon3,
    pub eta: Metric4,
    pub rhat3: FourIndexTensor,
    pub proj: Projectors4,
    pub rhat_ii_inv: FourIndexTensor,
}

impl Tensors {
    pub fn new(p: &DeformationParams) -> Self {
        let g = Metric3::new(p);
        let eps = Epsilon3::new(p, &g);
        let proj = build_projectors4(p);
        Self {
            params: *p,
            rhat3: build_rhat3(p),
            rhat_ii_inv: build_rmatrix4_inverse(&proj, p),
            proj,
            eta: Metric4::new(p),
            g,
            eps,
        }
    }
}

/// A dense tensor `T^{ab}_{cd}` over `dim`-valued indices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourIndexTensor {
    dim: usize,
    data: Vec<f64>,
}

impl FourIndexTensor {
    /// The zero tensor.
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim.pow(4)],
        }
    }

    /// The identity `δ^a_c δ^b_d`.
    pub fn identity(dim: usize) -> Self {
        let mut t = Self::zeros(dim);
        for a in 0..dim {
            for b in 0..dim {
                t.set(a, b, a, b, 1.0);
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn offset(&self, a: usize, b: usize, c: usize, d: usize) -> usize {
        ((a * self.dim + b) * self.dim + c) * self.dim + d
    }

    /// Component `T^{ab}_{cd}`.
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.data[self.offset(a, b, c, d)]
    }

    pub fn set(&mut self, a: usize, b: usize, c: usize, d: usize, v: f64) {
        let o = self.offset(a, b, c, d);
        self.data[o] = v;
    }

    /// `Σ_k c_k T_k`.
    pub fn combine(terms: &[(f64, &FourIndexTensor)]) -> Self {
        let dim = terms[0].1.dim;
        let mut out = Self::zeros(dim);
        for (c, t) in terms {
            assert_eq!(t.dim, dim, "tensor dimensions differ");
            for (o, v) in out.data.iter_mut().zip(&t.data) {
                *o += c * v;
            }
        }
        out
    }

    /// The tensor as a `dim² × dim²` matrix on index pairs.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        let n = self.dim * self.dim;
        DMatrix::from_row_slice(n, n, &self.data)
    }

    /// Inverse of [`FourIndexTensor::to_matrix`].
    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        let n = m.nrows();
        let dim = (n as f64).sqrt().round() as usize;
        assert_eq!(dim * dim, n, "matrix size is not a square of the index range");
        let mut t = Self::zeros(dim);
        for r in 0..n {
            for c in 0..n {
                t.data[r * n + c] = m[(r, c)];
            }
        }
        t
    }

    /// Nested `T[a][b][c][d]` arrays, the layout used by the JSON dump.
    pub fn to_nested(&self) -> Vec<Vec<Vec<Vec<f64>>>> {
        let d = self.dim;
        (0..d)
            .map(|a| {
                (0..d)
                    .map(|b| (0..d).map(|c| (0..d).map(|e| self.get(a, b, c, e)).collect()).collect())
                    .collect()
            })
            .collect()
    }

    /// Trace as a matrix on index pairs.
    pub fn trace(&self) -> f64 {
        self.to_matrix().trace()
    }

    /// Residual of the braid relation
    /// `(T⊗1)(1⊗T)(T⊗1) − (1⊗T)(T⊗1)(1⊗T)`, max-entry norm.
    pub fn braid_residual(&self) -> f64 {
        let d = self.dim;
        let n = d * d * d;
        let mut left = DMatrix::<f64>::zeros(n, n);
        let mut right = DMatrix::<f64>::zeros(n, n);
        let idx = |a: usize, b: usize, c: usize| (a * d + b) * d + c;
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for a2 in 0..d {
                        for b2 in 0..d {
                            // T acting on the first two factors.
                            left[(idx(a, b, c), idx(a2, b2, c))] = self.get(a, b, a2, b2);
                            // T acting on the last two factors.
                            right[(idx(c, a, b), idx(c, a2, b2))] = self.get(a, b, a2, b2);
                        }
                    }
                }
            }
        }
        let lhs = &left * &right * &left;
        let rhs = &right * &left * &right;
        (lhs - rhs).amax()
    }
}

/// Scalar product `x∘y = g_AB x^A y^B = x³y³ − q x⁺y⁻ − q^{-1} x⁻y⁺`.
pub fn circ3(x: &[Complex64; 3], y: &[Complex64; 3], p: &DeformationParams) -> Complex64 {
    let g = Metric3::new(p);
    let mut s = Complex64::new(0.0, 0.0);
    for a in 0..3 {
        for b in 0..3 {
            if g.lower[a][b] != 0.0 {
                s += x[a] * y[b] * g.lower[a][b];
            }
        }
    }
    s
}

/// Invariant 4d product `x⁰y⁰ − x³y³ + q x⁺y⁻ + q^{-1} x⁻y⁺ = −η_ab x^a y^b`.
pub fn dot4(x: &[Complex64; 4], y: &[Complex64; 4], p: &DeformationParams) -> Complex64 {
    let eta = Metric4::new(p);
    let mut s = Complex64::new(0.0, 0.0);
    for a in 0..4 {
        for b in 0..4 {
            if eta.eta[a][b] != 0.0 {
                s -= x[a] * y[b] * eta.eta[a][b];
            }
        }
    }
    s
}

/// The 3d braid matrix
/// `R̂^{AB}_{CD} = δ^A_C δ^B_D − q^{-4} ε^{FAB} ε_{FDC} − q^{-4}(q²−1) g^{AB} g_{CD}`.
pub fn build_rhat3(p: &DeformationParams) -> FourIndexTensor {
    let q = p.q();
    let g = Metric3::new(p);
    let eps = Epsilon3::new(p, &g);
    let q4 = q.powi(-4);
    let mut r = FourIndexTensor::identity(3);
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                for d in 0..3 {
                    let ee: f64 = (0..3).map(|f| eps.upper[f][a][b] * eps.lower[f][d][c]).sum();
                    let v = r.get(a, b, c, d) - q4 * ee - q4 * (q * q - 1.0) * g.upper[a][b] * g.lower[c][d];
                    r.set(a, b, c, d, v);
                }
            }
        }
    }
    r
}

/// Eigenvalues of the 3d R̂ as a 9×9 matrix, sorted by real part.
///
/// Only recorded for reference; the algebra fixes the braid relation, not a
/// particular spectrum.
pub fn rhat3_eigenvalues(p: &DeformationParams) -> Vec<Complex64> {
    let m = build_rhat3(p).to_matrix();
    let mut ev: Vec<Complex64> = m.complex_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.re.total_cmp(&b.re));
    ev
}

/// The Minkowski projectors `P₊, P₋, P_T, P_S, P_A`.
#[derive(Debug, Clone, Serialize)]
pub struct Projectors4 {
    pub plus: FourIndexTensor,
    pub minus: FourIndexTensor,
    pub trace: FourIndexTensor,
    pub symmetric: FourIndexTensor,
    pub antisymmetric: FourIndexTensor,
}

/// Builds `P₊`, `P₋`, `P_T` from their block tables (blocks `00`, `C0`, `0D`,
/// `CD` over index pairs) and completes `P_S = 1 − P_T − P₊ − P₋`,
/// `P_A = P₊ + P₋`.
pub fn build_projectors4(p: &DeformationParams) -> Projectors4 {
    let q = p.q();
    let q2 = q * q;
    let q4 = q2 * q2;
    let g = Metric3::new(p);
    let eps = Epsilon3::new(p, &g);
    let e = &eps.mixed;
    let k = 1.0 / (1.0 + q2).powi(2);
    let z = ZERO;
    let delta = |a: usize, c: usize| if a == c { 1.0 } else { 0.0 };

    // g^{EB} g^{FA} ε_{FEC}
    let mut egg = [[[0.0; 3]; 3]; 3];
    // ε_{DC}^E g^{SB} g^{RA} ε_{RSE}, indexed [A][B][C][D]
    let mut cdab = [[[[0.0; 3]; 3]; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                let mut s = 0.0;
                for f in 0..3 {
                    for ee in 0..3 {
                        s += g.upper[ee][b] * g.upper[f][a] * eps.lower[f][ee][c];
                    }
                }
                egg[a][b][c] = s;
                for d in 0..3 {
                    let mut s = 0.0;
                    for ee in 0..3 {
                        for ss in 0..3 {
                            for rr in 0..3 {
                                s += e[d][c][ee] * g.upper[ss][b] * g.upper[rr][a] * eps.lower[rr][ss][ee];
                            }
                        }
                    }
                    cdab[a][b][c][d] = s;
                }
            }
        }
    }

    let mut pp = FourIndexTensor::zeros(4);
    let mut pm = FourIndexTensor::zeros(4);
    let mut pt = FourIndexTensor::zeros(4);
    for a in 0..3 {
        for c in 0..3 {
            let dl = delta(a, c);
            pp.set(a, z, c, z, k * q2 * dl);
            pp.set(a, z, z, c, -k * dl);
            pp.set(z, a, c, z, -k * q4 * dl);
            pp.set(z, a, z, c, k * q2 * dl);
            pm.set(a, z, c, z, k * q2 * dl);
            pm.set(a, z, z, c, -k * q4 * dl);
            pm.set(z, a, c, z, -k * dl);
            pm.set(z, a, z, c, k * q2 * dl);
            for d in 0..3 {
                pp.set(a, z, c, d, k * e[d][c][a]);
                pp.set(z, a, c, d, -k * q2 * e[d][c][a]);
                pm.set(a, z, c, d, -k * q2 * e[d][c][a]);
                pm.set(z, a, c, d, k * e[d][c][a]);
            }
        }
    }
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                pp.set(a, b, c, z, k * q2 * egg[a][b][c]);
                pp.set(a, b, z, c, -k * egg[a][b][c]);
                pm.set(a, b, c, z, -k * egg[a][b][c]);
                pm.set(a, b, z, c, k * q2 * egg[a][b][c]);
                for d in 0..3 {
                    // Identical in both tables.
                    pp.set(a, b, c, d, k * cdab[a][b][c][d]);
                    pm.set(a, b, c, d, k * cdab[a][b][c][d]);
                }
            }
        }
    }
    pt.set(z, z, z, z, k * q2);
    for c in 0..3 {
        for d in 0..3 {
            pt.set(z, z, c, d, -k * q2 * g.lower[c][d]);
            pt.set(c, d, z, z, -k * q2 * g.upper[c][d]);
            for a in 0..3 {
                for b in 0..3 {
                    pt.set(a, b, c, d, k * q2 * g.upper[a][b] * g.lower[c][d]);
                }
            }
        }
    }
    let id = FourIndexTensor::identity(4);
    let symmetric = FourIndexTensor::combine(&[(1.0, &id), (-1.0, &pt), (-1.0, &pp), (-1.0, &pm)]);
    let antisymmetric = FourIndexTensor::combine(&[(1.0, &pp), (1.0, &pm)]);
    Projectors4 {
        plus: pp,
        minus: pm,
        trace: pt,
        symmetric,
        antisymmetric,
    }
}

/// Which of the two 4d R-matrices to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RMatrixVariant {
    /// `R̂_I = P_S + P_T − q² P₊ − q^{-2} P₋`.
    I,
    /// `R̂_II = q^{-2} P_S + q² P_T − P₊ − P₋`.
    II,
}

/// The 4d R-matrix in projector form.
pub fn build_rmatrix4(variant: RMatrixVariant, proj: &Projectors4, p: &DeformationParams) -> FourIndexTensor {
    let q2 = p.q() * p.q();
    match variant {
        RMatrixVariant::I => FourIndexTensor::combine(&[
            (1.0, &proj.symmetric),
            (1.0, &proj.trace),
            (-q2, &proj.plus),
            (-1.0 / q2, &proj.minus),
        ]),
        RMatrixVariant::II => FourIndexTensor::combine(&[
            (1.0 / q2, &proj.symmetric),
            (q2, &proj.trace),
            (-1.0, &proj.plus),
            (-1.0, &proj.minus),
        ]),
    }
}

/// `R̂_II^{-1} = q² P_S + q^{-2} P_T − P₊ − P₋`.
pub fn build_rmatrix4_inverse(proj: &Projectors4, p: &DeformationParams) -> FourIndexTensor {
    let q2 = p.q() * p.q();
    FourIndexTensor::combine(&[
        (q2, &proj.symmetric),
        (1.0 / q2, &proj.trace),
        (-1.0, &proj.plus),
        (-1.0, &proj.minus),
    ])
}

/// The 4d ε-tensor `ε^{ab}_{cd} = P₊ − P₋`.
pub fn epsilon4(proj: &Projectors4) -> FourIndexTensor {
    FourIndexTensor::combine(&[(1.0, &proj.plus), (-1.0, &proj.minus)])
}

/// Max-entry residuals of the projector identities: idempotence of each of
/// `P₊, P₋, P_T, P_S`, all pairwise products, and completeness.
pub fn projector_identity_residual(proj: &Projectors4) -> f64 {
    let ms = [
        proj.plus.to_matrix(),
        proj.minus.to_matrix(),
        proj.trace.to_matrix(),
        proj.symmetric.to_matrix(),
    ];
    let mut worst: f64 = 0.0;
    for (i, a) in ms.iter().enumerate() {
        for (j, b) in ms.iter().enumerate() {
            let prod = a * b;
            let r = if i == j { (prod - a).amax() } else { prod.amax() };
            worst = worst.max(r);
        }
    }
    let sum = &ms[0] + &ms[1] + &ms[2] + &ms[3];
    worst.max((sum - DMatrix::<f64>::identity(16, 16)).amax())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(q: f64) -> DeformationParams {
        DeformationParams::new(q).unwrap()
    }

    #[test]
    fn metric_inverse_both_orders() {
        let g = Metric3::new(&p(1.3));
        for a in 0..3 {
            for c in 0..3 {
                let s1: f64 = (0..3).map(|b| g.lower[a][b] * g.upper[b][c]).sum();
                let s2: f64 = (0..3).map(|b| g.upper[a][b] * g.lower[b][c]).sum();
                let d = if a == c { 1.0 } else { 0.0 };
                assert!((s1 - d).abs() < 1e-15 && (s2 - d).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn metric4_inverse() {
        let m = Metric4::new(&p(1.2));
        for a in 0..4 {
            for c in 0..4 {
                let s: f64 = (0..4).map(|b| m.eta[a][b] * m.eta[b][c]).sum();
                assert!((s - if a == c { 1.0 } else { 0.0 }).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn epsilon_has_exactly_seven_components() {
        let pp = p(1.1);
        let eps = Epsilon3::new(&pp, &Metric3::new(&pp));
        let nnz = eps.mixed.iter().flatten().flatten().filter(|v| **v != 0.0).count();
        assert_eq!(nnz, 7);
        assert!((eps.mixed[THREE][THREE][THREE] - (1.0 - 1.21)).abs() < 1e-15);
    }

    #[test]
    fn lowering_then_raising_roundtrips() {
        let pp = p(1.4);
        let g = Metric3::new(&pp);
        let eps = Epsilon3::new(&pp, &g);
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let back: f64 = (0..3).map(|d| g.upper[c][d] * eps.lower[a][b][d]).sum();
                    assert!((back - eps.mixed[a][b][c]).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn circ_and_dot_examples() {
        let pp = p(1.1);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        assert_eq!(circ3(&[zero, zero, one], &[zero, zero, one], &pp), one);
        assert!((circ3(&[one, zero, zero], &[zero, one, zero], &pp).re + 1.1).abs() < 1e-15);
        assert_eq!(dot4(&[zero, zero, zero, one], &[zero, zero, zero, one], &pp), one);
        assert_eq!(dot4(&[zero, zero, one, zero], &[zero, zero, one, zero], &pp), -one);
        assert!((dot4(&[one, zero, zero, zero], &[zero, one, zero, zero], &pp).re - 1.1).abs() < 1e-15);
    }

    #[test]
    fn rhat3_33_entry() {
        let pp = p(1.1);
        let q: f64 = 1.1;
        let expected = 1.0 - q.powi(-4) * (1.0 - q * q).powi(2) - q.powi(-4) * (q * q - 1.0);
        assert!((build_rhat3(&pp).get(THREE, THREE, THREE, THREE) - expected).abs() < 1e-15);
    }

    #[test]
    fn pt_corner_entry() {
        let q: f64 = 1.3;
        let proj = build_projectors4(&p(q));
        let expected = q * q / (1.0 + q * q).powi(2);
        assert!((proj.trace.get(ZERO, ZERO, ZERO, ZERO) - expected).abs() < 1e-15);
    }

    #[test]
    fn epsilon4_identities() {
        let proj = build_projectors4(&p(1.1));
        let e = epsilon4(&proj).to_matrix();
        assert!((&e * &e - proj.antisymmetric.to_matrix()).amax() < 1e-13);
        assert!(e.trace().abs() < 1e-13);
        assert!((&e * proj.trace.to_matrix()).amax() < 1e-13);
    }

    #[test]
    fn matrix_roundtrip() {
        let t = build_rhat3(&p(1.2));
        assert_eq!(FourIndexTensor::from_matrix(&t.to_matrix()), t);
    }
}
