//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, WhittakerError>;

#[derive(Debug, Clone, Error)]
pub enum WhittakerError {
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },

    #[error("evaluation at a zero coordinate with a negative exponent present")]
    ZeroCoordinate,

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("rank must be at least 2, got {0}")]
    InvalidRank(usize),

    #[error("spectral parameters must all be nonzero")]
    ZeroSpectralParam,

    #[error("spectral parameters do not have unit determinant (|product - 1| = {0:.3e})")]
    NotUnitDeterminant(f64),

    #[error("spectral parameters too close for the alternant ratio (min separation {0:.3e}); use the Jacobi-Trudi evaluator")]
    IllConditioned(f64),

    #[error("tableau oracle guard exceeded (partition weight {weight} > 12 or rank {rank} > 5)")]
    OracleTooLarge { weight: u64, rank: usize },

    #[error("symbolic Schur support guard exceeded (partition weight {0} > 40)")]
    SupportGuardExceeded(u64),

    #[error("outside the convergence domain (max |a_i b_j| = {0})")]
    DivergentDomain(f64),

    #[error("pole in a closed-form denominator")]
    Pole,

    #[error("negative valuation is outside the Whittaker support cone")]
    NegativeValuation,

    #[error("spectral function fails the symmetry check (max deviation {0:.3e})")]
    NotSymmetric(f64),

    #[error("operation requires an exact Laurent representative")]
    ExactRequired,

    #[error("decay contract violated: {0}")]
    DecayContract(String),

    #[error("no closed form for degree {0}; use the quadrature path")]
    UnsupportedDegree(u32),

    #[error("quadrature pole within {0:.3e} of the contour")]
    NearContourPole(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
