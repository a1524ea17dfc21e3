use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: String, got: String },

    #[error("iterate diverged at {x:?}")]
    Divergence { x: (f64, f64) },

    #[error("dynamical map is not invertible: {0}")]
    NotInvertible(String),

    #[error("s^{period} is the identity on the search box; use the analytic first-order path")]
    DegenerateMap { period: usize },

    #[error("point is not periodic with period {period} (defect {defect:e})")]
    NotPeriodic { period: usize, defect: f64 },

    #[error("expected an order-1 algebra, got order {0}")]
    WrongOrder(usize),

    #[error("gcd({k}, {n}) != 1")]
    NonPrimitive { n: u64, k: u64 },

    #[error("invalid orbit: {0}")]
    InvalidOrbit(String),

    #[error("invalid string: {0}")]
    InvalidString(String),

    #[error("not a representation: {0}")]
    NotARepresentation(String),

    #[error("WW^dagger and W^daggerW do not commute (commutator {0:e})")]
    NotSimultaneouslyDiagonalizable(f64),

    #[error("representation is not locally injective")]
    NotLocallyInjective,

    #[error("decomposition failed: {0}")]
    DecompositionFailed(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
