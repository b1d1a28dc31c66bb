//! Explicit finite truncations of the Hilbert-space representations of the
//! q-deformed Minkowski space algebra, with numerical verification of its
//! defining relations.
//!
//! The crate is organised bottom-up:
//!
//! * [`qnum`] — q-numbers `[a]`, `{a}` and `λ = q − 1/q`.
//! * [`tensors`] — metrics, ε-tensors, the 3d R̂-matrix and the 4d projector
//!   decomposition.
//! * [`hilbert`] — sectors (space-like, forward/backward time-like,
//!   light-like), basis labels `|j, m, n, M⟩`, truncation windows, spectra.
//! * [`sparse`] — a small CSR operator type carrying shift signatures and
//!   exactness halos.
//! * [`operators`] — reduced matrix-element tables and every generator
//!   (coordinates, `R`, `S`, `U`, `Λ^{±1/2}`, momenta, Lorentz generators,
//!   the `SU_q(2)` generators).
//! * [`verify`] — the relation catalog, residual engine, light-cone
//!   obstruction probe and classical-limit probe.
//! * [`cli`] — command plumbing shared by the `qmink` binary and examples.
//!
//! ```
//! use qminkowski::prelude::*;
//!
//! let window = TruncationWindow::new(2, (-2, 2), (0, 0), 0).unwrap();
//! let set = build_sector(1.1, SectorKind::SpaceLike, 1.0, window).unwrap();
//! let report = evaluate_catalog(&relation_catalog(&set.params), &set, VerifyOptions::default()).unwrap();
//! assert!(report.reports.iter().filter(|r| !r.inconclusive).all(|r| r.pass));
//! ```

// Tensor contractions read most clearly with explicit component indices.
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod error;
pub mod hilbert;
pub mod operators;
pub mod qnum;
pub mod sparse;
pub mod tensors;
pub mod verify;

pub use error::{Error, Result};

/// The types and functions most programs need.
pub mod prelude {
    pub use crate::error::{Error, Result};
    pub use crate::hilbert::{BasisLabel, BasisMap, Sector, SectorKind, SpectrumPoint, TruncationWindow};
    pub use crate::operators::{BuildOptions, OperatorSet};
    pub use crate::qnum::{bracket, curly, DeformationParams};
    pub use crate::sparse::SparseOperator;
    pub use crate::tensors::Tensors;
    pub use crate::verify::{build_sector, evaluate_catalog, lightcone_obstruction, relation_catalog, VerifyOptions};
}
