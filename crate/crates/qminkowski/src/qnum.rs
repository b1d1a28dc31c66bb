//! q-number arithmetic.
//!
//! Every matrix element in this crate is a rational expression in powers of
//! the deformation parameter `q`.  The two building blocks are
//!
//! * the q-number `[a] = (q^a − q^−a) / (q − q^−1)`, odd in `a`, and
//! * the curly number `{a} = q^a + q^−a`, even in `a`,
//!
//! together with `λ = q − 1/q`.  All arithmetic is plain `f64`; `q^a` is
//! evaluated as `exp(a · ln q)` so that half-integer exponents need no special
//! casing.

use crate::error::{Error, Result};
use serde::Serialize;

/// The deformation parameter `q > 1` together with the derived `λ = q − 1/q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeformationParams {
    q: f64,
    ln_q: f64,
    lambda: f64,
}

impl DeformationParams {
    /// Creates the parameter set; `q` must be finite and strictly greater than 1.
    ///
    /// The classical limit is probed by taking `q` close to, never equal to, 1.
    pub fn new(q: f64) -> Result<Self> {
        if !q.is_finite() || q <= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "deformation parameter q must satisfy q > 1, got {q}"
            )));
        }
        Ok(Self {
            q,
            ln_q: q.ln(),
            lambda: q - 1.0 / q,
        })
    }

    /// The deformation parameter.
    pub fn q(&self) -> f64 {
        self.q
    }

    /// `λ = q − 1/q`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `q^a` for real `a`.
    pub fn pow(&self, a: f64) -> f64 {
        (a * self.ln_q).exp()
    }

    /// `q^k` for integer `k`.
    pub fn powi(&self, k: i64) -> f64 {
        self.pow(k as f64)
    }

    /// The q-number `[a]`.
    pub fn bracket(&self, a: f64) -> f64 {
        // sinh form avoids cancellation for small |a ln q|.
        (a * self.ln_q).sinh() / self.ln_q.sinh()
    }

    /// The curly number `{a}`.
    pub fn curly(&self, a: f64) -> f64 {
        2.0 * (a * self.ln_q).cosh()
    }

    /// `[k]` for integer `k`.
    pub fn br(&self, k: i64) -> f64 {
        self.bracket(k as f64)
    }

    /// `{k}` for integer `k`.
    pub fn cu(&self, k: i64) -> f64 {
        self.curly(k as f64)
    }
}

/// The q-number `[a] = (q^a − q^−a)/(q − q^−1)`.
pub fn bracket(a: f64, p: &DeformationParams) -> f64 {
    p.bracket(a)
}

/// The curly number `{a} = q^a + q^−a`.
pub fn curly(a: f64, p: &DeformationParams) -> f64 {
    p.curly(a)
}

/// Both sides of the closed-form summation
///
/// `Σ_{l=1..j} [2l+1]/({l}²{l+1}²) = [2j]/([2]{j}²{j+1}²) · (1 + [2j+2]/[2])`.
///
/// Returns `(lhs, rhs)`; `j = 0` is rejected because the closed form is only
/// asserted for non-empty sums.
pub fn sum_identity(j: u32, p: &DeformationParams) -> Result<(f64, f64)> {
    if j == 0 {
        return Err(Error::InvalidParameter("sum identity requires j >= 1".to_string()));
    }
    let j = i64::from(j);
    let lhs: f64 = (1..=j)
        .map(|l| p.br(2 * l + 1) / (p.cu(l).powi(2) * p.cu(l + 1).powi(2)))
        .sum();
    let rhs = p.br(2 * j) / (p.br(2) * p.cu(j).powi(2) * p.cu(j + 1).powi(2)) * (1.0 + p.br(2 * j + 2) / p.br(2));
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(q: f64) -> DeformationParams {
        DeformationParams::new(q).unwrap()
    }

    #[test]
    fn rejects_q_not_above_one() {
        assert!(DeformationParams::new(1.0).is_err());
        assert!(DeformationParams::new(0.5).is_err());
        assert!(DeformationParams::new(f64::NAN).is_err());
        assert!(DeformationParams::new(1.0 + 1e-9).is_ok());
    }

    #[test]
    fn lambda_matches_definition() {
        let p = p(1.37);
        assert_eq!(p.lambda(), 1.37 - 1.0 / 1.37);
    }

    #[test]
    fn trivial_values() {
        let p = p(1.1);
        assert_eq!(p.bracket(0.0), 0.0);
        assert!((p.bracket(1.0) - 1.0).abs() < 1e-15);
        assert_eq!(p.curly(0.0), 2.0);
    }

    #[test]
    fn bracket_two_at_q_1_1() {
        // [2] = q + 1/q, evaluated directly from the quotient definition.
        let q: f64 = 1.1;
        let direct = (q * q - 1.0 / (q * q)) / (q - 1.0 / q);
        assert!((p(q).bracket(2.0) - direct).abs() < 1e-14);
        assert!((p(q).bracket(2.0) - 2.009_090_909_090_909).abs() < 1e-12);
        assert!((p(q).curly(1.0) - p(q).bracket(2.0)).abs() < 1e-14);
    }

    #[test]
    fn sum_identity_rejects_zero() {
        assert!(sum_identity(0, &p(1.1)).is_err());
    }

    #[test]
    fn sum_identity_small_j_by_hand() {
        // j = 1: [3]/({1}²{2}²) on the left, and 1 + [4]/[2] = 1 + {2} = [3].
        let p = p(1.3);
        let (lhs, rhs) = sum_identity(1, &p).unwrap();
        let hand = p.br(3) / (p.cu(1).powi(2) * p.cu(2).powi(2));
        assert!((lhs - hand).abs() < 1e-15);
        assert!((rhs - hand).abs() < 1e-14);
    }
}
