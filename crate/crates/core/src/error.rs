use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("operands live on different spaces")]
    SpaceMismatch,

    #[error("Fock index {n} outside truncated space of dimension {dim}")]
    FockIndex { n: usize, dim: usize },

    #[error("operator unavailable: {0}")]
    InvalidOperator(String),

    #[error("non-finite entries in {0}")]
    NonFinite(&'static str),

    #[error("truncation: tail mass {mass:e} in top Fock levels exceeds {tol:e}")]
    Truncation { mass: f64, tol: f64 },

    #[error("invalid couplings: {0}")]
    InvalidCouplings(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("adiabaticity failure: fidelity {fidelity:.6} with the tracked ray is below {threshold}")]
    Adiabaticity { fidelity: f64, threshold: f64 },

    #[error("norm drift {drift:e} at t = {t}")]
    NormDrift { drift: f64, t: f64 },

    #[error("vanishing link overlap {overlap:e} at loop sample {index}")]
    VanishingOverlap { index: usize, overlap: f64 },
}

impl Error {
    /// True for failures of a numerical contract (truncation, adiabaticity,
    /// norm conservation) as opposed to malformed input.
    pub fn is_numeric_contract(&self) -> bool {
        matches!(
            self,
            Error::NonFinite(_)
                | Error::Truncation { .. }
                | Error::Adiabaticity { .. }
                | Error::NormDrift { .. }
                | Error::VanishingOverlap { .. }
        )
    }

    /// Stable machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidSpace(_) => "invalid_space",
            Error::SpaceMismatch => "space_mismatch",
            Error::FockIndex { .. } => "fock_index",
            Error::InvalidOperator(_) => "invalid_operator",
            Error::NonFinite(_) => "non_finite",
            Error::Truncation { .. } => "truncation",
            Error::InvalidCouplings(_) => "invalid_couplings",
            Error::InvalidSchedule(_) => "invalid_schedule",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::Adiabaticity { .. } => "adiabaticity",
            Error::NormDrift { .. } => "norm_drift",
            Error::VanishingOverlap { .. } => "vanishing_overlap",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
