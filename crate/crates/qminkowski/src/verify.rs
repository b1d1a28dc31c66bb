//! Relation catalog and residual engine.
//!
//! Every defining relation and consequence of the algebra is stored as a
//! [`RelationSpec`]: two [`Expr`] operator polynomials that must agree.  The
//! engine evaluates `lhs − rhs` as a sparse matrix and measures it on the
//! interior subspace, i.e. on states far enough from the truncation boundary
//! that no intermediate state of any product left the window.  The interior
//! is derived from the expression itself (see [`Expr::budget`]).
//!
//! Besides the catalog this module hosts the light-cone obstruction probe,
//! the time-like counterpart that solves for the momentum elements, the
//! classical-limit probe and a reduced-element cross-check for `X∘R`.

use crate::error::{Error, Result};
use crate::hilbert::{BasisLabel, BasisMap, Sector, SectorKind, ShiftBudget, TruncationWindow};
use crate::operators::{
    assemble_vector_operator, op_circ, reduced_x_table, x_reduced_rho, BuildOptions, OperatorSet, ReducedKey,
};
use crate::qnum::DeformationParams;
use crate::sparse::{ShiftSignature, SparseOperator};
use crate::tensors::{Tensors, COMPONENT_LABELS, MINUS, PLUS, THREE, ZERO};
use nalgebra::Matrix2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use std::fmt;

type C64 = Complex64;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

const I: C64 = C64 { re: 0.0, im: 1.0 };

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

/// An operator polynomial over named generators.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// A generator by name, e.g. `X+`, `P0`, `Lam^-1/2`, `V+0`.
    Gen(String),
    /// The identity.
    Identity,
    /// `c · e`.
    Scale(C64, Box<Expr>),
    /// `e₁ + e₂ + …`.
    Sum(Vec<Expr>),
    /// `e₁ e₂ …` (left to right).
    Product(Vec<Expr>),
    /// Conjugate transpose.
    Adjoint(Box<Expr>),
}

/// Shorthand constructors.
pub mod expr {
    use super::*;

    pub fn gen(name: impl Into<String>) -> Expr {
        Expr::Gen(name.into())
    }

    pub fn id() -> Expr {
        Expr::Identity
    }

    pub fn sc(c: C64, e: Expr) -> Expr {
        Expr::Scale(c, Box::new(e))
    }

    pub fn scr(c: f64, e: Expr) -> Expr {
        sc(re(c), e)
    }

    pub fn sum(terms: Vec<Expr>) -> Expr {
        Expr::Sum(terms)
    }

    pub fn prod(factors: Vec<Expr>) -> Expr {
        Expr::Product(factors)
    }

    pub fn adj(e: Expr) -> Expr {
        Expr::Adjoint(Box::new(e))
    }

    pub fn zero() -> Expr {
        Expr::Sum(Vec::new())
    }

    /// `a b`.
    pub fn mul(a: Expr, b: Expr) -> Expr {
        prod(vec![a, b])
    }

    /// `[a, b]`.
    pub fn comm(a: Expr, b: Expr) -> Expr {
        sum(vec![mul(a.clone(), b.clone()), scr(-1.0, mul(b, a))])
    }
}

use expr::*;

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Gen(n) => write!(f, "{n}"),
            Expr::Identity => write!(f, "1"),
            Expr::Scale(c, e) => write!(f, "({c:.6})·{e}"),
            Expr::Sum(v) if v.is_empty() => write!(f, "0"),
            Expr::Sum(v) => {
                write!(f, "(")?;
                for (i, t) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, ")")
            }
            Expr::Product(v) => {
                for (i, t) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, "·")?;
                    }
                    write!(f, "{t}")?;
                }
                Ok(())
            }
            Expr::Adjoint(e) => write!(f, "adj({e})"),
        }
    }
}

/// Generators available to relation expressions, by name.
pub struct Environment {
    ops: HashMap<String, SparseOperator>,
    basis: BasisMap,
}

impl Environment {
    /// Collects every generator of `set`, plus `V^{ab}` (`V+0`, `V-3`, …),
    /// `τ^{±1/2}`, `XoX` and the label operator `JJ = [j][j+1]`.
    pub fn new(set: &OperatorSet) -> Self {
        let mut ops = HashMap::new();
        for o in set.named_operators() {
            ops.insert(o.name().to_string(), o.clone());
        }
        for (a, row) in set.v.iter().enumerate() {
            for (b, v) in row.iter().enumerate() {
                let name = format!("V{}{}", COMPONENT_LABELS[a], COMPONENT_LABELS[b]);
                ops.insert(name.clone(), v.clone().named(name));
            }
        }
        ops.insert("tau^1/2".into(), set.su.tau_half.clone());
        ops.insert("tau^-1/2".into(), set.su.tau_neg_half.clone());
        let p = &set.params;
        let jj: Vec<C64> = set
            .basis
            .labels()
            .iter()
            .map(|l| re(p.br(l.j) * p.br(l.j + 1)))
            .collect();
        ops.insert("JJ".into(), SparseOperator::diagonal("JJ", &jj));
        Self {
            ops,
            basis: set.basis.clone(),
        }
    }

    pub fn basis(&self) -> &BasisMap {
        &self.basis
    }

    pub fn get(&self, name: &str) -> Result<&SparseOperator> {
        self.ops
            .get(name)
            .ok_or_else(|| Error::MissingGenerator(name.to_string()))
    }

    pub fn has(&self, name: &str) -> bool {
        self.ops.contains_key(name)
    }
}

impl Expr {
    /// Names of all generators referenced.
    pub fn generators(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect(&self, out: &mut Vec<String>) {
        match self {
            Expr::Gen(n) => out.push(n.clone()),
            Expr::Identity => {}
            Expr::Scale(_, e) | Expr::Adjoint(e) => e.collect(out),
            Expr::Sum(v) | Expr::Product(v) => v.iter().for_each(|e| e.collect(out)),
        }
    }

    /// Shift signature and exactness halo, computed bottom-up from the
    /// generators: a product is exact on a state if every intermediate state
    /// stays inside the window, so its halo is the largest over factors of
    /// (reach of the factors applied before it + that factor's own halo).
    pub fn budget(&self, env: &Environment) -> Result<(ShiftSignature, ShiftBudget)> {
        Ok(match self {
            Expr::Gen(n) => {
                let o = env.get(n)?;
                (o.signature().clone(), o.halo())
            }
            Expr::Identity => (ShiftSignature::diagonal(), ShiftBudget::ZERO),
            Expr::Scale(_, e) => e.budget(env)?,
            Expr::Adjoint(e) => {
                let (s, h) = e.budget(env)?;
                (s.reversed(), h)
            }
            Expr::Sum(v) => {
                let mut sig: Option<ShiftSignature> = None;
                let mut halo = ShiftBudget::ZERO;
                for t in v {
                    let (s, h) = t.budget(env)?;
                    sig = Some(match sig {
                        None => s,
                        Some(a) => a.join(&s),
                    });
                    halo = halo.max(h);
                }
                (sig.unwrap_or_else(ShiftSignature::diagonal), halo)
            }
            Expr::Product(v) => {
                // Operators act right to left: the rightmost factor is applied
                // first.
                let mut sig = ShiftSignature::diagonal();
                let mut halo = ShiftBudget::ZERO;
                for t in v.iter().rev() {
                    let (s, h) = t.budget(env)?;
                    halo = halo.max(sig.reach().plus(h));
                    sig = s.compose(&sig);
                }
                (sig, halo)
            }
        })
    }

    /// Evaluates the expression to a sparse matrix.
    pub fn evaluate(&self, env: &Environment) -> Result<SparseOperator> {
        let dim = env.basis.dim();
        Ok(match self {
            Expr::Gen(n) => env.get(n)?.clone(),
            Expr::Identity => SparseOperator::identity(dim),
            Expr::Scale(c, e) => e.evaluate(env)?.scale(*c),
            Expr::Adjoint(e) => e.evaluate(env)?.adjoint(),
            Expr::Sum(v) => {
                let ops = v.iter().map(|t| t.evaluate(env)).collect::<Result<Vec<_>>>()?;
                if ops.is_empty() {
                    SparseOperator::zeros(dim)
                } else {
                    let terms: Vec<_> = ops.iter().map(|o| (re(1.0), o)).collect();
                    SparseOperator::linear_combination(&terms)?
                }
            }
            Expr::Product(v) => {
                let mut acc: Option<SparseOperator> = None;
                for t in v {
                    let o = t.evaluate(env)?;
                    acc = Some(match acc {
                        None => o,
                        Some(a) => a.matmul(&o)?,
                    });
                }
                acc.unwrap_or_else(|| SparseOperator::identity(dim))
            }
        })
    }

    /// The top-level summands (scalars pushed inside), used for the
    /// normalisation of residuals.
    fn terms(&self) -> Vec<Expr> {
        match self {
            Expr::Sum(v) => v.iter().flat_map(|t| t.terms()).collect(),
            Expr::Scale(c, e) => e.terms().into_iter().map(|t| sc(*c, t)).collect(),
            other => vec![other.clone()],
        }
    }
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

/// Sectors a relation is checked on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Applicability {
    /// Every sector.
    All,
    /// Only where momenta exist (not on the light cone).
    WithMomenta,
}

impl Applicability {
    pub fn applies_to(&self, kind: SectorKind) -> bool {
        match self {
            Applicability::All => true,
            Applicability::WithMomenta => kind != SectorKind::LightLike,
        }
    }
}

/// One scalar component identity `lhs = rhs`.
#[derive(Debug, Clone)]
pub struct RelationSpec {
    /// Unique name, e.g. `space-noncommutativity[+]`.
    pub name: String,
    /// Catalog group number (1..=18).
    pub group: u32,
    /// Group title.
    pub group_title: &'static str,
    /// What the identity expresses.
    pub description: String,
    pub lhs: Expr,
    pub rhs: Expr,
    pub sectors: Applicability,
}

impl RelationSpec {
    /// Whether momentum generators occur.
    pub fn involves_momenta(&self) -> bool {
        self.lhs
            .generators()
            .iter()
            .chain(self.rhs.generators().iter())
            .any(|g| g.starts_with('P'))
    }
}

/// Titles of the catalog groups, by group number.
pub const GROUP_TITLES: [&str; 18] = [
    "space noncommutativity",
    "momentum noncommutativity",
    "q-Lorentz algebra",
    "Lorentz Casimir",
    "Lorentz action on coordinates",
    "Lorentz action on momenta",
    "scaling operator",
    "covariant Heisenberg relation",
    "orthogonality of angular momentum",
    "Casimir equality R∘R = S∘S",
    "conjugation",
    "rotations commute with scalars",
    "rotation algebra",
    "SU_q(2) algebra",
    "rotations acting on vectors",
    "SU_q(2) acting on coordinates",
    "complete commuting set",
    "explicit Heisenberg relations",
];

const SUF: [&str; 3] = ["+", "-", "3"];

/// Component `a` (0..4, `ZERO` = time) of the vector named `v`.
fn comp(v: &str, a: usize) -> Expr {
    if a == ZERO {
        gen(format!("{v}0"))
    } else {
        gen(format!("{v}{}", SUF[a]))
    }
}

/// `Σ_{AB} g_AB a^A b^B` as an expression.
fn circ(t: &Tensors, a: &str, b: &str) -> Expr {
    let mut v = Vec::new();
    for i in 0..3 {
        for k in 0..3 {
            let g = t.g.lower[i][k];
            if g != 0.0 {
                v.push(scr(g, mul(comp(a, i), comp(b, k))));
            }
        }
    }
    sum(v)
}

/// `Σ coeff · (left)(right)` over the nonzero entries of a 3×3 coefficient
/// table `c[x][y]`, with factors `left = comp(a, x)`, `right = comp(b, y)`.
fn contract2(c: impl Fn(usize, usize) -> f64, a: &str, b: &str) -> Vec<Expr> {
    let mut v = Vec::new();
    for x in 0..3 {
        for y in 0..3 {
            let k = c(x, y);
            if k != 0.0 {
                v.push(scr(k, mul(comp(a, x), comp(b, y))));
            }
        }
    }
    v
}

struct CatalogBuilder {
    out: Vec<RelationSpec>,
}

impl CatalogBuilder {
    fn add(&mut self, group: u32, name: String, description: &str, lhs: Expr, rhs: Expr) {
        let spec = RelationSpec {
            name,
            group,
            group_title: GROUP_TITLES[group as usize - 1],
            description: description.to_string(),
            lhs,
            rhs,
            sectors: Applicability::All,
        };
        let sectors = if spec.involves_momenta() {
            Applicability::WithMomenta
        } else {
            Applicability::All
        };
        self.out.push(RelationSpec { sectors, ..spec });
    }
}

/// The complete relation catalog, expanded into scalar component identities.
pub fn relation_catalog(p: &DeformationParams) -> Vec<RelationSpec> {
    let t = Tensors::new(p);
    let q = p.q();
    let q2 = q * q;
    let q4 = q2 * q2;
    let lam = p.lambda();
    let (b2, b3, c2) = (p.br(2), p.br(3), p.cu(2));
    let e = &t.eps.mixed; // e[C][B][A] = ε_{CB}^A
    let ell = &t.eps.left_lower; // ell[C][A][B] = ε_C^{AB}
    let eup = &t.eps.upper; // ε^{ABG}
    let elo = &t.eps.lower; // ε_{STG}
    let gu = &t.g.upper;
    let gl = &t.g.lower;
    let s1 = (1.0 + q2).sqrt();
    let mut cb = CatalogBuilder { out: Vec::new() };

    // 1, 2: noncommutativity of X and of P.
    for (group, v, what) in [(1, "X", "coordinates"), (2, "P", "momenta")] {
        for a in 0..3 {
            cb.add(
                group,
                format!("{v}{v}-epsilon[{}]", SUF[a]),
                &format!("ε-contracted product of the {what} is proportional to the time component"),
                sum(contract2(|bb, cc| e[cc][bb][a], v, v)),
                scr(1.0 - q2, mul(comp(v, ZERO), comp(v, a))),
            );
            cb.add(
                group,
                format!("{v}0-central[{}]", SUF[a]),
                &format!("the time component commutes with the space {what}"),
                mul(comp(v, ZERO), comp(v, a)),
                mul(comp(v, a), comp(v, ZERO)),
            );
        }
    }

    // 3: q-Lorentz algebra.
    for a in 0..3 {
        cb.add(
            3,
            format!("RR-epsilon[{}]", SUF[a]),
            "ε-contracted R R is proportional to U R",
            sum(contract2(|bb, cc| e[cc][bb][a], "R", "R")),
            scr(1.0 / (1.0 + q2), mul(gen("U"), comp("R", a))),
        );
        cb.add(
            3,
            format!("SS-epsilon[{}]", SUF[a]),
            "ε-contracted S S is proportional to U S",
            sum(contract2(|bb, cc| e[cc][bb][a], "S", "S")),
            scr(-1.0 / (1.0 + q2), mul(gen("U"), comp("S", a))),
        );
        for bb in 0..3 {
            let rhs = sum(contract2(|c, d| q2 * t.rhat3.get(a, bb, c, d), "S", "R"));
            cb.add(
                3,
                format!("RS-braiding[{}{}]", SUF[a], SUF[bb]),
                "R S reordered through the 3d R-matrix",
                mul(comp("R", a), comp("S", bb)),
                rhs,
            );
        }
        for v in ["R", "S"] {
            cb.add(
                3,
                format!("U-central-{v}[{}]", SUF[a]),
                "U commutes with the Lorentz generators",
                mul(gen("U"), comp(v, a)),
                mul(comp(v, a), gen("U")),
            );
        }
    }

    // 4: Casimir forms of U.
    let uu = mul(gen("U"), gen("U"));
    let k4 = (q4 - 1.0) * (q4 - 1.0);
    cb.add(
        4,
        "U2-casimir-symmetric".into(),
        "U² in terms of the symmetric Casimir combination of R∘R and S∘S",
        uu.clone(),
        sum(vec![
            id(),
            scr(0.5 * k4, circ(&t, "R", "R")),
            scr(0.5 * k4, circ(&t, "S", "S")),
        ]),
    );
    cb.add(
        4,
        "U2-casimir-RR".into(),
        "U² − 1 fixes the length of R∘R",
        sum(vec![uu.clone(), scr(-1.0, id())]),
        scr(k4, circ(&t, "R", "R")),
    );

    // 5, 6: Lorentz action on X and P.
    let c_diag = (q4 + 1.0) / (q * (q2 + 1.0));
    for (group, v) in [(5, "X"), (6, "P")] {
        for (y, cu_r) in [("R", q / (1.0 + q2).powi(2)), ("S", 1.0 / (q * (1.0 + q2).powi(2)))] {
            for a in 0..3 {
                let mut rhs = vec![scr(c_diag, mul(comp(v, ZERO), comp(y, a)))];
                rhs.extend(contract2(|m, l| (q2 - 1.0) / (q * (q2 + 1.0)) * e[l][m][a], v, y));
                rhs.push(scr(-cu_r, mul(comp(v, a), gen("U"))));
                cb.add(
                    group,
                    format!("{y}{v}0[{}]", SUF[a]),
                    &format!("{y} moved through the time component of {v}"),
                    mul(comp(y, a), comp(v, ZERO)),
                    sum(rhs),
                );
                for bb in 0..3 {
                    let is_r = y == "R";
                    let mut rhs = vec![scr(
                        if is_r { q * (1.0 + q2) } else { (1.0 + q2) / q },
                        mul(comp(v, a), comp(y, bb)),
                    )];
                    for c in 0..3 {
                        if ell[c][a][bb] != 0.0 {
                            rhs.push(scr(-(q2 - 1.0) / q * ell[c][a][bb], mul(comp(v, ZERO), comp(y, c))));
                        }
                    }
                    if gu[a][bb] != 0.0 {
                        let k = if is_r { -(q2 - 1.0) / q } else { q * (q2 - 1.0) };
                        rhs.extend(contract2(|m, c| k * gu[a][bb] * gl[m][c], v, y));
                    }
                    // −(2/q) ε^{ABG} ε_{STG} X^T Y^S
                    rhs.extend(contract2(
                        |tt, s| -2.0 / q * (0..3).map(|g| eup[a][bb][g] * elo[s][tt][g]).sum::<f64>(),
                        v,
                        y,
                    ));
                    if gu[a][bb] != 0.0 {
                        let k = if is_r { -1.0 / (q * (1.0 + q2)) } else { -q / (1.0 + q2) };
                        rhs.push(scr(k * gu[a][bb], mul(comp(v, ZERO), gen("U"))));
                    }
                    for m in 0..3 {
                        if ell[m][a][bb] != 0.0 {
                            let k = if is_r { 1.0 } else { -1.0 } / (q * (1.0 + q2));
                            rhs.push(scr(k * ell[m][a][bb], mul(comp(v, m), gen("U"))));
                        }
                    }
                    cb.add(
                        group,
                        format!("{y}{v}[{}{}]", SUF[a], SUF[bb]),
                        &format!("{y} moved through the space components of {v}"),
                        mul(comp(y, a), comp(v, bb)),
                        scr(1.0 / (1.0 + q2), sum(rhs)),
                    );
                }
            }
        }
        let k = (q2 - 1.0) * (q2 - 1.0);
        cb.add(
            group,
            format!("U{v}0"),
            &format!("U moved through the time component of {v}"),
            mul(gen("U"), comp(v, ZERO)),
            sum(vec![
                scr(c_diag, mul(comp(v, ZERO), gen("U"))),
                scr(-k / q, circ(&t, v, "R")),
            ]),
        );
        for a in 0..3 {
            let mut rhs = vec![
                scr(c_diag, mul(comp(v, a), gen("U"))),
                scr(-q * k, mul(comp(v, ZERO), comp("R", a))),
            ];
            rhs.extend(contract2(|bb, c| -k / q * e[c][bb][a], v, "R"));
            cb.add(
                group,
                format!("U{v}[{}]", SUF[a]),
                &format!("U moved through the space components of {v}"),
                mul(gen("U"), comp(v, a)),
                sum(rhs),
            );
        }
    }

    // 7: scaling operator.
    let lh = || gen("Lam^1/2");
    for (v, f) in [("X", 1.0 / q), ("P", q)] {
        for a in 0..4 {
            let l = COMPONENT_LABELS[a];
            cb.add(
                7,
                format!("Lambda-{v}[{l}]"),
                &format!("Λ^(1/2) rescales {v}"),
                mul(lh(), comp(v, a)),
                scr(f, mul(comp(v, a), lh())),
            );
        }
    }
    for a in 0..4 {
        for bb in 0..4 {
            if a == ZERO && bb == ZERO {
                continue;
            }
            let name = format!("V{}{}", COMPONENT_LABELS[a], COMPONENT_LABELS[bb]);
            cb.add(
                7,
                format!("Lambda-{name}"),
                "Λ^(1/2) commutes with the Lorentz generators",
                mul(lh(), gen(&name)),
                mul(gen(&name), lh()),
            );
        }
    }
    cb.add(
        7,
        "Lambda-U".into(),
        "Λ^(1/2) commutes with U",
        mul(lh(), gen("U")),
        mul(gen("U"), lh()),
    );

    // 8: covariant Heisenberg relation.
    let rinv = &t.rhat_ii_inv;
    let eta = &t.eta.eta;
    for a in 0..4 {
        for bb in 0..4 {
            let mut lhs = vec![mul(comp("P", a), comp("X", bb))];
            for c in 0..4 {
                for d in 0..4 {
                    let k = rinv.get(a, bb, c, d);
                    if k != 0.0 {
                        lhs.push(scr(-k / q2, mul(comp("X", c), comp("P", d))));
                    }
                }
            }
            let mut inner = Vec::new();
            if eta[a][bb] != 0.0 {
                inner.push(scr((1.0 + q4) * eta[a][bb], gen("U")));
            }
            if !(a == ZERO && bb == ZERO) {
                inner.push(scr(
                    q2 * (1.0 - q4),
                    gen(format!("V{}{}", COMPONENT_LABELS[a], COMPONENT_LABELS[bb])),
                ));
            }
            cb.add(
                8,
                format!("PX-covariant[{}{}]", COMPONENT_LABELS[a], COMPONENT_LABELS[bb]),
                "the q-deformed Heisenberg relation in covariant form",
                sum(lhs),
                sc(-0.5 * I, mul(gen("Lam^-1/2"), sum(inner))),
            );
        }
    }

    // 9: angular momentum orthogonal to X and P.
    for v in ["X", "P"] {
        let mut terms = contract2(|a, bb| gl[a][bb], v, "R");
        terms.extend(contract2(|a, bb| -q2 * gl[a][bb], v, "S"));
        cb.add(
            9,
            format!("orthogonality-{v}-scalar"),
            &format!("g_AB {v}^A (R^B − q² S^B) vanishes"),
            sum(terms),
            zero(),
        );
        for a in 0..3 {
            let mut terms = vec![
                mul(comp(v, ZERO), comp("S", a)),
                scr(-q2, mul(comp(v, ZERO), comp("R", a))),
            ];
            terms.extend(contract2(|bb, c| -e[c][bb][a], v, "R"));
            terms.extend(contract2(|bb, c| -e[c][bb][a], v, "S"));
            cb.add(
                9,
                format!("orthogonality-{v}-vector[{}]", SUF[a]),
                &format!("{v}⁰(S − q²R) − ε {v}(R + S) vanishes"),
                sum(terms),
                zero(),
            );
        }
    }

    // 10: R∘R = S∘S.
    cb.add(
        10,
        "RoR-equals-SoS".into(),
        "the two Lorentz Casimir combinations agree",
        circ(&t, "R", "R"),
        circ(&t, "S", "S"),
    );

    // 11: conjugation.
    for v in ["X", "P"] {
        cb.add(
            11,
            format!("conj-{v}0"),
            &format!("{v}⁰ is self-adjoint"),
            adj(comp(v, ZERO)),
            comp(v, ZERO),
        );
        for a in 0..3 {
            let rhs: Vec<_> = (0..3)
                .filter(|&bb| gl[a][bb] != 0.0)
                .map(|bb| scr(gl[a][bb], comp(v, bb)))
                .collect();
            cb.add(
                11,
                format!("conj-{v}[{}]", SUF[a]),
                &format!("adjoint of {v}^A is g_AB {v}^B"),
                adj(comp(v, a)),
                sum(rhs),
            );
        }
    }
    for (x, y) in [("R", "S"), ("S", "R")] {
        for a in 0..3 {
            let rhs: Vec<_> = (0..3)
                .filter(|&bb| gl[a][bb] != 0.0)
                .map(|bb| scr(-gl[a][bb], comp(y, bb)))
                .collect();
            cb.add(
                11,
                format!("conj-{x}[{}]", SUF[a]),
                &format!("adjoint of {x}^A is −g_AB {y}^B"),
                adj(comp(x, a)),
                sum(rhs),
            );
        }
    }
    cb.add(11, "conj-U".into(), "U is self-adjoint", adj(gen("U")), gen("U"));
    cb.add(
        11,
        "conj-Lambda".into(),
        "adjoint of Λ^(1/2) is q⁴ Λ^(-1/2)",
        adj(lh()),
        scr(q4, gen("Lam^-1/2")),
    );

    // 12: rotations commute with scalars.
    for a in 0..3 {
        let la = || comp("L", a);
        for (what, s) in [
            ("X0", comp("X", ZERO)),
            ("P0", comp("P", ZERO)),
            ("XoX", gen("XoX")),
            ("PoP", circ(&t, "P", "P")),
        ] {
            cb.add(
                12,
                format!("L-commutes-{what}[{}]", SUF[a]),
                "rotations commute with rotation scalars",
                mul(la(), s.clone()),
                mul(s, la()),
            );
        }
    }

    // 13: rotation algebra.
    for a in 0..3 {
        cb.add(
            13,
            format!("LL-epsilon[{}]", SUF[a]),
            "ε-contracted L L is proportional to W L",
            sum(contract2(|c, bb| e[bb][c][a], "L", "L")),
            scr(-1.0 / q2, mul(gen("W"), comp("L", a))),
        );
    }
    cb.add(
        13,
        "LoL-W".into(),
        "the length of L is fixed by W",
        scr(q4 * (q2 - 1.0) * (q2 - 1.0), circ(&t, "L", "L")),
        sum(vec![mul(gen("W"), gen("W")), scr(-1.0, id())]),
    );

    // 14: SU_q(2) algebra.
    let (tp, tm, tau) = (|| gen("T+"), || gen("T-"), || gen("tau"));
    cb.add(
        14,
        "TT-commutator".into(),
        "q⁻¹T⁺T⁻ − qT⁻T⁺ = (1 − τ)/λ",
        sum(vec![scr(1.0 / q, mul(tp(), tm())), scr(-q, mul(tm(), tp()))]),
        scr(1.0 / lam, sum(vec![id(), scr(-1.0, tau())])),
    );
    cb.add(
        14,
        "tau-T+".into(),
        "τ T⁺ = q⁻⁴ T⁺ τ",
        mul(tau(), tp()),
        scr(1.0 / q4, mul(tp(), tau())),
    );
    cb.add(
        14,
        "tau-T-".into(),
        "τ T⁻ = q⁴ T⁻ τ",
        mul(tau(), tm()),
        scr(q4, mul(tm(), tau())),
    );
    let casimir = casimir_expr(p);
    cb.add(
        14,
        "casimir-eigenvalue".into(),
        "the SU_q(2) Casimir is diagonal with eigenvalue [j][j+1]",
        casimir.clone(),
        gen("JJ"),
    );
    cb.add(
        14,
        "conj-T+".into(),
        "adjoint of T⁺ is q⁻² T⁻",
        adj(tp()),
        scr(1.0 / q2, tm()),
    );
    cb.add(14, "conj-T-".into(), "adjoint of T⁻ is q² T⁺", adj(tm()), scr(q2, tp()));
    cb.add(14, "conj-tau".into(), "τ is self-adjoint", adj(tau()), tau());

    // 15: L and W acting on X and P.
    for v in ["X", "P"] {
        for a in 0..3 {
            for bb in 0..3 {
                let mut rhs = Vec::new();
                if gu[a][bb] != 0.0 {
                    rhs.push(scr(gu[a][bb], circ(&t, v, "L")));
                }
                // −q⁻² ε_{KC}^A ε_D^{KB} X^C L^D, with ε_D^{KB} = g^{KK'} ε_{DK'}^B
                rhs.extend(contract2(
                    |c, d| {
                        -1.0 / q2
                            * (0..3)
                                .map(|k| e[k][c][a] * (0..3).map(|k2| gu[k][k2] * e[d][k2][bb]).sum::<f64>())
                                .sum::<f64>()
                    },
                    v,
                    "L",
                ));
                for c in 0..3 {
                    if ell[c][a][bb] != 0.0 {
                        rhs.push(scr(-ell[c][a][bb] / q4, mul(comp(v, c), gen("W"))));
                    }
                }
                cb.add(
                    15,
                    format!("L{v}[{}{}]", SUF[a], SUF[bb]),
                    &format!("rotation generators moved through {v}"),
                    mul(comp("L", a), comp(v, bb)),
                    sum(rhs),
                );
            }
            let mut rhs = vec![scr(q2 + 1.0 / q2 - 1.0, mul(comp(v, a), gen("W")))];
            rhs.extend(contract2(|c, d| (q2 - 1.0) * (q2 - 1.0) * e[d][c][a], v, "L"));
            cb.add(
                15,
                format!("W{v}[{}]", SUF[a]),
                &format!("W moved through the space components of {v}"),
                mul(gen("W"), comp(v, a)),
                sum(rhs),
            );
        }
        cb.add(
            15,
            format!("W{v}0"),
            &format!("W commutes with {v}⁰"),
            mul(gen("W"), comp(v, ZERO)),
            mul(comp(v, ZERO), gen("W")),
        );
    }

    // 16: SU_q(2) acting on coordinates.
    let x = |a: usize| comp("X", a);
    let tx: Vec<(&str, Expr, Expr)> = vec![
        ("tau-X3", mul(tau(), x(THREE)), mul(x(THREE), tau())),
        ("tau-X+", mul(tau(), x(PLUS)), scr(1.0 / q4, mul(x(PLUS), tau()))),
        ("tau-X-", mul(tau(), x(MINUS)), scr(q4, mul(x(MINUS), tau()))),
        (
            "T--X3",
            mul(tm(), x(THREE)),
            sum(vec![mul(x(THREE), tm()), scr(q * s1, x(MINUS))]),
        ),
        (
            "T+-X-",
            mul(tp(), x(MINUS)),
            sum(vec![scr(q2, mul(x(MINUS), tp())), scr(s1 / q, x(THREE))]),
        ),
        ("T--X-", mul(tm(), x(MINUS)), scr(q2, mul(x(MINUS), tm()))),
        (
            "T+-X3",
            mul(tp(), x(THREE)),
            sum(vec![mul(x(THREE), tp()), scr(s1 / q2, x(PLUS))]),
        ),
        ("T+-X+", mul(tp(), x(PLUS)), scr(1.0 / q2, mul(x(PLUS), tp()))),
        (
            "T--X+",
            mul(tm(), x(PLUS)),
            sum(vec![scr(1.0 / q2, mul(x(PLUS), tm())), scr(s1, x(THREE))]),
        ),
    ];
    for (name, l, r) in tx {
        cb.add(16, name.into(), "SU_q(2) generators moved through X", l, r);
    }

    // 17: complete set of commuting operators.
    let set = [
        ("X0", comp("X", ZERO)),
        ("XoX", gen("XoX")),
        ("T2", casimir),
        ("tau", tau()),
    ];
    for i in 0..set.len() {
        for k in (i + 1)..set.len() {
            cb.add(
                17,
                format!("commute-{}-{}", set[i].0, set[k].0),
                "members of the complete commuting set commute",
                mul(set[i].1.clone(), set[k].1.clone()),
                mul(set[k].1.clone(), set[i].1.clone()),
            );
        }
    }

    // 18: explicit Heisenberg relations.
    let (x0, p0) = (|| comp("X", ZERO), || comp("P", ZERO));
    let lhi = || gen("Lam^-1/2");
    let xop = || circ(&t, "X", "P");
    let pox = || circ(&t, "P", "X");
    cb.add(
        18,
        "XP-time-time".into(),
        "time components of X and P",
        sum(vec![
            scr(q2 * b2, mul(p0(), x0())),
            scr(-q * c2, mul(x0(), p0())),
            scr(-lam, xop()),
        ]),
        sc(0.5 * I * b2 * c2 * q4, mul(lhi(), gen("U"))),
    );
    for a in 0..3 {
        let mut l = vec![
            scr(q2 * b2, mul(p0(), x(a))),
            scr(-q * c2, mul(x(a), p0())),
            scr(-lam * q2, mul(x0(), comp("P", a))),
        ];
        l.extend(contract2(|c, d| -lam * e[d][c][a], "X", "P"));
        cb.add(
            18,
            format!("XP-time-space[{}]", SUF[a]),
            "P⁰ moved through the space components of X",
            sum(l),
            sc(
                -0.5 * I * b2 * b2 * q4 * q2 * lam,
                mul(lhi(), sum(vec![scr(q2, comp("R", a)), comp("S", a)])),
            ),
        );
        let mut l = vec![
            scr(q2 * b2, mul(comp("P", a), x0())),
            scr(-q * c2, mul(x0(), comp("P", a))),
            scr(-lam * q2, mul(x(a), p0())),
        ];
        l.extend(contract2(|c, d| -lam * e[d][c][a], "X", "P"));
        cb.add(
            18,
            format!("XP-space-time[{}]", SUF[a]),
            "P^A moved through X⁰",
            sum(l),
            sc(
                0.5 * I * b2 * b2 * q4 * q2 * lam,
                mul(lhi(), sum(vec![comp("R", a), scr(q2, comp("S", a))])),
            ),
        );
        for bb in 0..3 {
            let mut l = vec![scr(b2, mul(comp("P", a), x(bb))), scr(-b2, mul(x(a), comp("P", bb)))];
            l.extend(contract2(
                |c, d| 2.0 / (q2 * q) * (0..3).map(|ee| e[d][c][ee] * ell[ee][a][bb]).sum::<f64>(),
                "X",
                "P",
            ));
            if gu[a][bb] != 0.0 {
                l.push(scr(lam / q2 * gu[a][bb], xop()));
                l.push(scr(-lam / q2 * gu[a][bb], mul(x0(), p0())));
            }
            for c in 0..3 {
                if ell[c][a][bb] != 0.0 {
                    l.push(scr(lam / q2 * ell[c][a][bb], mul(x(c), p0())));
                    l.push(scr(lam / q2 * ell[c][a][bb], mul(x0(), comp("P", c))));
                }
            }
            let mut inner = Vec::new();
            if gu[a][bb] != 0.0 {
                inner.push(scr(c2 * gu[a][bb], gen("U")));
            }
            for c in 0..3 {
                if ell[c][a][bb] != 0.0 {
                    let k = -q2 * lam * b2 * ell[c][a][bb];
                    inner.push(scr(k, comp("R", c)));
                    inner.push(scr(-k, comp("S", c)));
                }
            }
            cb.add(
                18,
                format!("XP-space-space[{}{}]", SUF[a], SUF[bb]),
                "space components of P moved through space components of X",
                sum(l),
                sc(-0.5 * I * b2 * q2, mul(lhi(), sum(inner))),
            );
        }
    }
    cb.add(
        18,
        "XP-contracted".into(),
        "contraction of the space-space relation with the metric",
        sum(vec![
            pox(),
            scr(-c2 / (q2 * q * b2), xop()),
            scr(-lam * b3 / (q2 * b2), mul(x0(), p0())),
        ]),
        sc(-0.5 * I * q2 * c2 * b3, mul(lhi(), gen("U"))),
    );
    let lam_comb = |s: f64| sum(vec![scr(q4 * s, lhi()), gen("Lam^1/2")]);
    cb.add(
        18,
        "PX-time".into(),
        "commutator of the time components",
        sum(vec![mul(p0(), x0()), scr(-1.0, mul(x0(), p0()))]),
        sc(0.5 * I, mul(lam_comb(1.0), gen("U"))),
    );
    cb.add(
        18,
        "PX-scalar".into(),
        "P∘X − X∘P",
        sum(vec![pox(), scr(-1.0, xop())]),
        sc(-0.5 * I * b3, mul(lam_comb(1.0), gen("U"))),
    );
    cb.add(
        18,
        "PX-mixed".into(),
        "λ(X∘P − X⁰P⁰)",
        scr(lam, sum(vec![xop(), scr(-1.0, mul(x0(), p0()))])),
        sc(
            0.5 * I * q2 * b2,
            mul(sum(vec![gen("Lam^1/2"), scr(-1.0, lhi())]), gen("U")),
        ),
    );
    cb.add(
        18,
        "XPX0".into(),
        "X∘P X⁰ reordered, multiplied through by X⁰",
        sum(vec![
            mul(xop(), x0()),
            scr(-2.0 / (q * b2), mul(x0(), xop())),
            scr(-lam / b2, mul(gen("XoX"), p0())),
        ]),
        sc(I * q4 * lam * b2, mul(circ(&t, "X", "R"), lhi())),
    );
    cb.out
}

/// `T² = q τ^{-1/2} T⁻T⁺ + (q/λ²) τ^{-1/2} + (τ^{1/2} − q² − 1)/(qλ²)`.
pub fn casimir_expr(p: &DeformationParams) -> Expr {
    let q = p.q();
    let l2 = p.lambda() * p.lambda();
    sum(vec![
        scr(q, prod(vec![gen("tau^-1/2"), gen("T-"), gen("T+")])),
        scr(q / l2, gen("tau^-1/2")),
        scr(1.0 / (q * l2), gen("tau^1/2")),
        scr(-(q * q + 1.0) / (q * l2), id()),
    ])
}

// ---------------------------------------------------------------------------
// Residual engine
// ---------------------------------------------------------------------------

/// Measured residual of one relation on one sector.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub name: String,
    pub group: u32,
    pub sector: String,
    pub interior_dim: usize,
    pub max_residual: f64,
    pub frobenius: f64,
    /// Largest interior max-entry magnitude over the individual terms.
    pub normalization: f64,
    /// `max_residual / (1 + normalization)`.
    pub normalized: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Empty interior: nothing could be measured.
    pub inconclusive: bool,
}

/// Tolerances for [`evaluate_catalog`].
#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Normalised tolerance for relations without momenta.
    pub tol: f64,
    /// Normalised tolerance for relations involving momenta.
    pub tol_momenta: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            tol_momenta: 1e-9,
        }
    }
}

impl VerifyOptions {
    /// The same tolerance for every relation.
    pub fn uniform(tol: f64) -> Self {
        Self { tol, tol_momenta: tol }
    }
}

fn interior_mask(basis: &BasisMap, budget: ShiftBudget) -> (Vec<bool>, usize) {
    let idx = basis.interior_indices(budget);
    let mut mask = vec![false; basis.dim()];
    for &i in &idx {
        mask[i] = true;
    }
    (mask, idx.len())
}

/// Evaluates `lhs − rhs` on the interior of the relation's own budget.
pub fn evaluate(spec: &RelationSpec, env: &Environment, tol: f64) -> Result<ResidualReport> {
    let (_, hl) = spec.lhs.budget(env)?;
    let (_, hr) = spec.rhs.budget(env)?;
    let budget = hl.max(hr);
    let (mask, interior_dim) = interior_mask(env.basis(), budget);
    let sector = env.basis().sector().kind.tag().to_string();
    if interior_dim == 0 {
        return Ok(ResidualReport {
            name: spec.name.clone(),
            group: spec.group,
            sector,
            interior_dim,
            max_residual: f64::NAN,
            frobenius: f64::NAN,
            normalization: f64::NAN,
            normalized: f64::NAN,
            tolerance: tol,
            pass: false,
            inconclusive: true,
        });
    }
    let mut normalization: f64 = 0.0;
    let mut diff_terms = Vec::new();
    for (sign, side) in [(1.0, &spec.lhs), (-1.0, &spec.rhs)] {
        for term in side.terms() {
            let o = term.evaluate(env)?;
            normalization = normalization.max(o.restricted_norms(&mask).0);
            diff_terms.push((re(sign), o));
        }
    }
    let refs: Vec<_> = diff_terms.iter().map(|(c, o)| (*c, o)).collect();
    let diff = if refs.is_empty() {
        SparseOperator::zeros(env.basis().dim())
    } else {
        SparseOperator::linear_combination(&refs)?
    };
    let (max_residual, frobenius) = diff.restricted_norms(&mask);
    let normalized = max_residual / (1.0 + normalization);
    Ok(ResidualReport {
        name: spec.name.clone(),
        group: spec.group,
        sector,
        interior_dim,
        max_residual,
        frobenius,
        normalization,
        normalized,
        tolerance: tol,
        pass: normalized <= tol,
        inconclusive: false,
    })
}

/// Outcome of checking the catalog on one sector.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogReport {
    pub sector: String,
    pub reports: Vec<ResidualReport>,
    /// Relations not applicable on this sector (momenta on the light cone).
    pub skipped: Vec<String>,
}

impl CatalogReport {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass && !r.inconclusive)
    }

    pub fn failures(&self) -> Vec<&ResidualReport> {
        self.reports.iter().filter(|r| !r.pass).collect()
    }

    /// Largest normalised residual among relations with/without momenta.
    pub fn worst(&self, momenta: Option<bool>, catalog: &[RelationSpec]) -> f64 {
        let involves: HashMap<&str, bool> = catalog
            .iter()
            .map(|s| (s.name.as_str(), s.involves_momenta()))
            .collect();
        self.reports
            .iter()
            .filter(|r| momenta.is_none_or(|m| involves.get(r.name.as_str()).copied() == Some(m)))
            .map(|r| r.normalized)
            .fold(0.0, f64::max)
    }
}

/// Evaluates every applicable relation, concurrently; reports are returned
/// in catalog order.
pub fn evaluate_catalog(catalog: &[RelationSpec], set: &OperatorSet, opts: VerifyOptions) -> Result<CatalogReport> {
    let env = Environment::new(set);
    let kind = set.sector().kind;
    let (applicable, skipped): (Vec<_>, Vec<_>) = catalog.iter().partition(|s| s.sectors.applies_to(kind));
    let reports = applicable
        .par_iter()
        .map(|s| {
            let tol = if s.involves_momenta() {
                opts.tol_momenta
            } else {
                opts.tol
            };
            evaluate(s, &env, tol)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CatalogReport {
        sector: kind.tag().to_string(),
        reports,
        skipped: skipped.into_iter().map(|s| s.name.clone()).collect(),
    })
}

// ---------------------------------------------------------------------------
// Light-cone obstruction
// ---------------------------------------------------------------------------

/// One diagonal element probed on the light cone.
#[derive(Debug, Clone, Serialize)]
pub struct ObstructionPoint {
    pub j: i64,
    pub m: i64,
    pub n: i64,
    pub t: f64,
    /// Smallest over largest singular value of the homogeneous 2×2 matrix.
    pub singular_ratio: f64,
    /// `|rhs₂ − (t/[2]) rhs₁| / |κ t|`: the inhomogeneity that no choice of
    /// unknowns can absorb, in units where the `U` element enters linearly.
    pub inhomogeneity: f64,
    /// The `U` element `⟨n|U|n+1⟩` of the sector.
    pub u_element: f64,
}

/// Result of the light-cone probe.
#[derive(Debug, Clone, Serialize)]
pub struct ObstructionReport {
    pub q: f64,
    pub tau0: f64,
    /// `κ = i q² (1 − (q² − q⁻²)/2)`, the factor relating the defect to `t·U`.
    pub kappa: f64,
    pub points: Vec<ObstructionPoint>,
    pub max_singular_ratio: f64,
    pub min_inhomogeneity: f64,
    pub verdict: String,
}

/// Assembles, for every interior diagonal element `⟨a|·|a⟩` of the light-cone
/// representation, the two linear equations for the unknown elements of
/// `X∘P` and `P⁰` that follow from the mixed `X∘P`/`X⁰P⁰` relation and the
/// `X∘P X⁰` relation.  All coefficients and inhomogeneities are taken from
/// the built operators.  The system is rank one; it is solvable only if the
/// inhomogeneity is proportional to the same row, which would require the
/// `U` element to vanish.
pub fn lightcone_obstruction(set: &OperatorSet) -> Result<ObstructionReport> {
    if set.sector().kind != SectorKind::LightLike {
        return Err(Error::InvalidParameter(
            "the obstruction probe applies to the light-like sector only".into(),
        ));
    }
    let p = &set.params;
    let q = p.q();
    let (q2, q4) = (q * q, q.powi(4));
    let (lam, b2) = (p.lambda(), p.br(2));
    let u = &set.u;
    let lh = &set.lam_half;
    let lhi = &set.lam_neg_half;
    let rhs1 = SparseOperator::linear_combination(&[(re(1.0), lh), (re(-1.0), lhi)])?
        .matmul(u)?
        .scale(0.5 * I * q2 * b2);
    let xr = op_circ(&set.tensors, &set.x, &set.r)?;
    let rhs2 = xr.matmul(lhi)?.scale(I * q4 * lam * b2);
    let kappa = q2 * (1.0 - (q2 - 1.0 / q2) / 2.0);
    let budget = rhs2.halo().max(rhs1.halo()).max(ShiftBudget::new(1, 1, 0));
    let mut points = Vec::new();
    for i in set.basis.interior_indices(budget) {
        let l = set.basis.label(i);
        let t = set.x0.get(i, i).re;
        let r2 = set.xcircx.get(i, i).re;
        let h = Matrix2::new(lam, -lam * t, t - 2.0 * t / (q * b2), -lam * r2 / b2);
        let sv = h.singular_values();
        let (smax, smin) = (sv.max(), sv.min());
        let delta = rhs2.get(i, i) - rhs1.get(i, i) * (t / b2);
        let inhom = if kappa.abs() > 1e-12 {
            delta.norm() / (kappa.abs() * t.abs())
        } else {
            delta.norm()
        };
        let nb = set.basis.index_of(&BasisLabel::new(l.j, l.m, l.n + 1, l.level));
        let u_el = nb.map(|k| u.get(i, k).re).unwrap_or(1.0 / b2);
        points.push(ObstructionPoint {
            j: l.j,
            m: l.m,
            n: l.n,
            t,
            singular_ratio: smin / smax,
            inhomogeneity: inhom,
            u_element: u_el,
        });
    }
    if points.is_empty() {
        return Err(Error::EmptyWindow("light (obstruction interior)".into()));
    }
    let max_singular_ratio = points.iter().map(|x| x.singular_ratio).fold(0.0, f64::max);
    let min_inhomogeneity = points.iter().map(|x| x.inhomogeneity).fold(f64::INFINITY, f64::min);
    let verdict = if kappa.abs() <= 1e-12 {
        "inconclusive: the defect factor vanishes at this q".to_string()
    } else if max_singular_ratio <= 1e-12 && min_inhomogeneity > 1e-8 {
        "no representation: the homogeneous system is singular and the inhomogeneity is nonzero".to_string()
    } else {
        "no obstruction detected".to_string()
    };
    Ok(ObstructionReport {
        q,
        tau0: set.sector().scale,
        kappa,
        points,
        max_singular_ratio,
        min_inhomogeneity,
        verdict,
    })
}

/// Result of solving the same 2×2 systems off the light cone.
#[derive(Debug, Clone, Serialize)]
pub struct SolvedMomentumReport {
    pub sector: String,
    pub pairs: usize,
    /// Smallest over pairs of `|det H| / ‖H‖²`; bounded away from zero when
    /// every system has a unique solution.
    pub min_relative_det: f64,
    /// Largest deviation of the solved `P⁰` element from the built table.
    pub max_p0_deviation: f64,
    /// Largest deviation of the solved `X∘P` element from the built product.
    pub max_xop_deviation: f64,
    /// Largest magnitude of the built `P⁰` elements compared.
    pub p0_scale: f64,
}

/// For every interior pair `⟨a|·|b⟩` linked by `P⁰`, solves the two linear
/// equations of [`lightcone_obstruction`] for `(X∘P)_ab, P⁰_ab` and compares
/// against the built operators.
pub fn solve_momentum_elements(set: &OperatorSet) -> Result<SolvedMomentumReport> {
    let (Some(pv), Some(p0)) = (&set.p, &set.p0) else {
        return Err(Error::NoRepresentation("momenta are not built on this sector".into()));
    };
    let p = &set.params;
    let q = p.q();
    let (q2, q4) = (q * q, q.powi(4));
    let (lam, b2) = (p.lambda(), p.br(2));
    let rhs1 = SparseOperator::linear_combination(&[(re(1.0), &set.lam_half), (re(-1.0), &set.lam_neg_half)])?
        .matmul(&set.u)?
        .scale(0.5 * I * q2 * b2);
    let xr = op_circ(&set.tensors, &set.x, &set.r)?;
    let rhs2 = xr.matmul(&set.lam_neg_half)?.scale(I * q4 * lam * b2);
    let xop = op_circ(&set.tensors, &set.x, pv)?;
    let budget = rhs2.halo().max(xop.halo()).max(ShiftBudget::new(1, 1, 1));
    let (mask, _) = interior_mask(&set.basis, budget);
    let mut pairs = 0;
    let mut min_rel_det = f64::INFINITY;
    let (mut dp0, mut dxop, mut scale): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for (a, b, want_p0) in p0.iter() {
        if !mask[a] || !mask[b] {
            continue;
        }
        let (ta, tb) = (set.x0.get(a, a).re, set.x0.get(b, b).re);
        let ra2 = set.xcircx.get(a, a).re;
        let h = Matrix2::new(lam, -lam * ta, tb - 2.0 * ta / (q * b2), -lam * ra2 / b2);
        let det = h.determinant();
        let hn = h.norm();
        min_rel_det = min_rel_det.min(det.abs() / (hn * hn));
        let hc = h.map(re);
        let rhs = nalgebra::Vector2::new(rhs1.get(a, b), rhs2.get(a, b));
        let Some(sol) = hc.lu().solve(&rhs) else {
            continue;
        };
        pairs += 1;
        dp0 = dp0.max((sol[1] - want_p0).norm());
        dxop = dxop.max((sol[0] - xop.get(a, b)).norm());
        scale = scale.max(want_p0.norm());
    }
    Ok(SolvedMomentumReport {
        sector: set.sector().kind.tag().to_string(),
        pairs,
        min_relative_det: min_rel_det,
        max_p0_deviation: dp0,
        max_xop_deviation: dxop,
        p0_scale: scale,
    })
}

// ---------------------------------------------------------------------------
// Classical limit
// ---------------------------------------------------------------------------

/// One row of the classical-limit table.
#[derive(Debug, Clone, Serialize)]
pub struct QLimitRow {
    pub q: f64,
    /// Largest interior entry of `[X^A, X^B]` over all `A, B`.
    pub commutator: f64,
    /// Largest entry of any `X^A`.
    pub x_scale: f64,
    /// `commutator / (1 + x_scale²)`.
    pub normalized: f64,
}

/// Measures the undeformed commutators `[X^A, X^B]` on a space-like window
/// (`l₀ = 1`, `j ≤ 3`, `n ∈ [−4, 4]`, `M = 0`) for each `q`.  They vanish
/// classically, so the normalised residual should scale like `q − 1`.
pub fn q_limit_probe(qs: &[f64]) -> Result<Vec<QLimitRow>> {
    qs.iter()
        .map(|&qv| {
            let p = DeformationParams::new(qv)?;
            let sector = Sector::new(SectorKind::SpaceLike, 1.0, &p)?;
            let window = TruncationWindow::new(3, (-4, 4), (0, 0), 0)?;
            let basis = crate::hilbert::enumerate_basis(sector, window)?;
            let x = assemble_vector_operator(&p, &reduced_x_table(&sector, &p, &basis), &basis)?;
            let (mask, _) = interior_mask(&basis, ShiftBudget::new(2, 0, 0));
            let mut w: f64 = 0.0;
            for a in 0..3 {
                for b in 0..3 {
                    w = w.max(x[a].commutator(&x[b])?.restricted_norms(&mask).0);
                }
            }
            let nrm = x.iter().map(|o| o.max_abs()).fold(0.0, f64::max);
            Ok(QLimitRow {
                q: qv,
                commutator: w,
                x_scale: nrm,
                normalized: w / (1.0 + nrm * nrm),
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Reduced-element cross-check
// ---------------------------------------------------------------------------

/// Largest deviation between the diagonal-in-j elements of `X∘R` computed as
/// an operator product and from the reduced-element expansion
/// `⟨j‖X∘R‖j⟩ = q²( [2j+2][2j]/[2] X_jj R_jj − [2j+2][2j+3] X_{j,j+1} R_{j+1,j}
///  − [2j][2j−1] X_{j,j−1} R_{j−1,j} )`, on the interior.
pub fn x_circ_r_expansion_deviation(set: &OperatorSet, r_reduced: impl Fn(&ReducedKey) -> f64) -> Result<f64> {
    let p = &set.params;
    let b = |k: i64| p.br(k);
    let q2 = p.q() * p.q();
    let sector = set.sector();
    let xr = op_circ(&set.tensors, &set.x, &set.r)?;
    let xred = |jp: i64, j: i64, n: i64, lv: i64| {
        x_reduced_rho(
            &sector,
            p,
            &ReducedKey {
                jp,
                np: n,
                levelp: lv,
                j,
                n,
                level: lv,
            },
        )
    };
    let mut worst: f64 = 0.0;
    for i in set.basis.interior_indices(xr.halo().max(ShiftBudget::new(2, 2, 0))) {
        let l = set.basis.label(i);
        for d in [-1, 1] {
            let Some(k) = set.basis.index_of(&BasisLabel::new(l.j, l.m, l.n + d, l.level)) else {
                continue;
            };
            let rk = |jp: i64| {
                r_reduced(&ReducedKey {
                    jp,
                    np: l.n,
                    levelp: l.level,
                    j: l.j,
                    n: l.n + d,
                    level: l.level,
                })
            };
            let j = l.j;
            let mut v = xred(j, j, l.n, l.level) * rk(j) * q2 * b(2 * j + 2) * b(2 * j) / b(2)
                - xred(j, j + 1, l.n, l.level) * rk(j + 1) * q2 * b(2 * j + 2) * b(2 * j + 3);
            if j > 0 {
                v -= xred(j, j - 1, l.n, l.level) * rk(j - 1) * q2 * b(2 * j) * b(2 * j - 1);
            }
            worst = worst.max((xr.get(i, k) - v).norm());
        }
    }
    Ok(worst)
}

/// Builds the operator set for one sector with default options.
pub fn build_sector(q: f64, kind: SectorKind, scale: f64, window: TruncationWindow) -> Result<OperatorSet> {
    let p = DeformationParams::new(q)?;
    let sector = Sector::new(kind, scale, &p)?;
    OperatorSet::build(&p, sector, window, &BuildOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_has_all_groups_and_enough_components() {
        let p = DeformationParams::new(1.1).unwrap();
        let cat = relation_catalog(&p);
        for g in 1..=18 {
            assert!(cat.iter().any(|s| s.group == g), "group {g} missing");
        }
        assert!(cat.len() >= 60, "only {} identities", cat.len());
        let mut names: Vec<_> = cat.iter().map(|s| s.name.clone()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), cat.len(), "duplicate relation names");
    }

    #[test]
    fn budget_of_noncommutativity_is_j_only() {
        let set = build_sector(
            1.1,
            SectorKind::SpaceLike,
            1.0,
            TruncationWindow::new(2, (-3, 3), (-1, 1), 0).unwrap(),
        )
        .unwrap();
        let env = Environment::new(&set);
        let p = DeformationParams::new(1.1).unwrap();
        let cat = relation_catalog(&p);
        let s = cat.iter().find(|s| s.name == "XX-epsilon[+]").unwrap();
        let (sig, halo) = s.lhs.budget(&env).unwrap();
        assert_eq!(halo, ShiftBudget::new(1, 0, 0));
        assert_eq!(sig.reach(), ShiftBudget::new(2, 0, 0));
        let h = cat.iter().find(|s| s.name == "PX-covariant[++]").unwrap();
        let (sig, _) = h.rhs.budget(&env).unwrap();
        assert!(sig.reach().level >= 1);
    }

    #[test]
    fn tiny_window_is_inconclusive() {
        let set = build_sector(
            1.1,
            SectorKind::SpaceLike,
            1.0,
            TruncationWindow::new(0, (-2, 2), (0, 0), 2).unwrap(),
        )
        .unwrap();
        let env = Environment::new(&set);
        let p = DeformationParams::new(1.1).unwrap();
        let s = relation_catalog(&p)
            .into_iter()
            .find(|s| s.name == "XX-epsilon[+]")
            .unwrap();
        let r = evaluate(&s, &env, 1e-10).unwrap();
        assert!(r.inconclusive && !r.pass);
    }

    #[test]
    fn x0_commutes_with_x3_exactly() {
        let set = build_sector(
            1.3,
            SectorKind::TimeLikeForward,
            1.0,
            TruncationWindow::new(2, (0, 5), (0, 0), 0).unwrap(),
        )
        .unwrap();
        let c = set.x0.commutator(&set.x[THREE]).unwrap();
        assert_eq!(c.max_abs(), 0.0);
    }
}
