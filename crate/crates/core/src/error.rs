use thiserror::Error;

/// Errors raised by the arithmetic, series and verification routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("expected a positive integer, got {0}")]
    NonPositive(String),

    #[error("{0} exceeds 2^64; supply its prime factorization explicitly")]
    FactorizationRequired(String),

    #[error("invalid factorization: {0}")]
    InvalidFactorization(String),

    #[error("{0} is inert in Z[i] (p = 3 mod 4); no element has norm p")]
    InertPrime(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coefficient of q^{index} requested but the series is truncated at order {order}")]
    BeyondOrder { index: usize, order: usize },

    #[error("guard violation: {0}")]
    Guard(String),

    #[error("under-determined system: rank {rank} < {unknowns} unknowns (raise the order)")]
    Underdetermined { rank: usize, unknowns: usize },

    #[error("series has zero constant term and cannot be inverted")]
    NotInvertible,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("certificate check failed: {0}")]
    CertificateCheck(String),
}

impl Error {
    /// Stable machine-readable tag for the CLI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonPositive(_) => "non_positive",
            Error::FactorizationRequired(_) => "factorization_required",
            Error::InvalidFactorization(_) => "invalid_factorization",
            Error::InertPrime(_) => "inert_prime",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::BeyondOrder { .. } => "beyond_order",
            Error::Guard(_) => "guard_violation",
            Error::Underdetermined { .. } => "underdetermined",
            Error::NotInvertible => "not_invertible",
            Error::Parse(_) => "parse",
            Error::CertificateCheck(_) => "certificate_check",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
