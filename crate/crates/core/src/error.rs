use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max |m - m^H| entry = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (max |U^H U - I| entry = {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("spectrum has a negative eigenvalue beyond tolerance (min = {min:.3e})")]
    NegativeSpectrum { min: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("argument {value} outside domain [{lo}, {hi}]")]
    OutOfDomain { value: f64, lo: f64, hi: f64 },

    #[error("reference dimension {ref_dim} is smaller than the state rank {rank}")]
    RefTooSmall { ref_dim: usize, rank: usize },

    #[error("perturbation amplitude {0} outside [0, 1]")]
    AmplitudeOutOfRange(f64),

    #[error("epsilon {eps} outside the valid range (0, 1/{d})")]
    EpsilonOutOfRange { eps: f64, d: usize },

    #[error("restricted bound requested with distance {0} > 1/e")]
    RegimeViolation(f64),

    #[error("operation requires a two-qubit state, got {da}x{db}")]
    WrongDimensions { da: usize, db: usize },

    #[error("total dimension {dim} exceeds the optimizer cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("requested provider is unavailable: {0}")]
    ProviderUnavailable(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
