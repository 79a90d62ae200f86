use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),

    #[error("invalid parameter binding: {0}")]
    InvalidParameter(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("state vector is zero")]
    ZeroVector,

    #[error("state norm {norm} deviates from 1 (use `normalize on` to rescale)")]
    NormViolation { norm: f64 },

    #[error("invalid subsystem layout: {0}")]
    InvalidLayout(String),

    #[error("unknown subsystem label or role `{0}`")]
    UnknownLabel(String),

    #[error("subsystem sets overlap on `{0}`")]
    OverlappingSets(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("eigensolver did not converge for dimension {dim} (residual {residual:e})")]
    NonConvergence { dim: usize, residual: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {0:e}")]
    NegativeEigenvalue(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),

    #[error("inconsistent exact-cost certificates: {0}")]
    CertificateInconsistency(String),
}

impl Error {
    /// Numerical faults, as opposed to malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::NegativeEigenvalue(_)
                | Error::InvalidDensityMatrix(_)
                | Error::CertificateInconsistency(_)
        )
    }
}
