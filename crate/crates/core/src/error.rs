use thiserror::Error;

/// Errors raised by walk simulation, POVM extraction and synthesis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vector norm {norm:e} is too small to normalize")]
    ZeroVector { norm: f64 },

    #[error("coin at position {position} is not unitary (defect {defect:e})")]
    NonUnitaryCoin { position: i64, defect: f64 },

    #[error("initial coin state has norm {norm}, expected 1")]
    NotNormalized { norm: f64 },

    #[error("POVM elements sum to identity only within {defect:e}")]
    CompletenessViolation { defect: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("invalid target POVM: {0}")]
    SpecInvalid(String),

    #[error("target weight {target} exceeds the removable weight {available} at this stage")]
    InfeasibleWeight { target: f64, available: f64 },

    #[error("complement state has squared norm {norm_sqr:e} at x=0; cannot build the splitting coin")]
    DegenerateResidual { norm_sqr: f64 },

    #[error("final residual differs from the last target by {defect:e}")]
    ResidualMismatch { defect: f64 },

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("no outcome at position {position}")]
    UnknownOutcome { position: i64 },

    #[error("merge did not preserve the POVM: {0}")]
    MergeMismatch(String),

    #[error("bad distribution: {0}")]
    BadDistribution(String),

    #[error("POVM is not informationally complete (Gram determinant {det:e})")]
    NotInformationallyComplete { det: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
