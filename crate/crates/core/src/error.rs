use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A matrix expected to be skew-symmetric has a symmetric part above tolerance.
    #[error("matrix is not skew-symmetric (symmetric-part defect {defect:.3e})")]
    NotSkewSymmetric { defect: f64 },
    /// A matrix expected to be symmetric has an asymmetry above tolerance.
    #[error("matrix is not symmetric (asymmetry {defect:.3e})")]
    NotSymmetric { defect: f64 },
    /// A matrix failed the rotation-matrix checks.
    #[error("matrix is not a rotation (orthogonality defect {ortho_defect:.3e}, det {det})")]
    NotRotation { ortho_defect: f64, det: f64 },
    /// A matrix failed the essential-matrix spectrum check.
    #[error("matrix is not essential (singular-value defect {defect:.3e})")]
    NotEssential { defect: f64 },
    /// A Plücker 6-vector failed validation.
    #[error("invalid Plücker line: {reason}")]
    InvalidPlucker { reason: String },
    /// A file did not contain the expected number of values.
    #[error("expected {expected} values, found {found} (line {line})")]
    ValueCount {
        expected: usize,
        found: usize,
        line: usize,
    },
    /// A token could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    /// Matrix dimensions do not match what the caller asked for.
    #[error("dimension mismatch: expected {expected_rows}x{expected_cols}, found {rows}x{cols}")]
    Dimension {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },
    /// A configuration value is out of range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable category for CLI exit reporting.
    pub fn category(&self) -> &'static str {
        match self {
            Error::NotSkewSymmetric { .. }
            | Error::NotSymmetric { .. }
            | Error::NotRotation { .. }
            | Error::NotEssential { .. }
            | Error::InvalidPlucker { .. } => "validation",
            Error::ValueCount { .. } | Error::Parse { .. } => "parse",
            Error::Dimension { .. } => "dimension",
            Error::InvalidConfig(_) => "config",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
