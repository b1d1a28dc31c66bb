//! Crate-wide error type.

use thiserror::Error;

/// Errors raised while building representations, operators or reports.
#[derive(Debug, Error)]
pub enum Error {
    /// A numeric parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The truncation window contains no admissible basis state.
    #[error("truncation window contains no admissible state for sector {0}")]
    EmptyWindow(String),

    /// The requested object does not exist on the given sector.
    #[error("no representation: {0}")]
    NoRepresentation(String),

    /// Two operators were combined although they live on different bases or
    /// have different dimensions.
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    /// An operator that must be diagonal on the interior is not.
    #[error("operator {name} is not diagonal on the interior (largest off-diagonal entry {offdiag:.3e})")]
    NotDiagonal { name: String, offdiag: f64 },

    /// An operator has a matrix element outside its declared shift signature.
    #[error("operator {name} violates its shift signature at ({row}, {col})")]
    ShiftSignature { name: String, row: usize, col: usize },

    /// A relation references a generator that has not been built.
    #[error("generator {0} is not available on this sector")]
    MissingGenerator(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
