use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("channel is not trace preserving (adjoint unitality defect {0:.3e})")]
    NotTracePreserving(f64),

    #[error("channel is not completely positive (Choi eigenvalue {0:.3e})")]
    NotCompletelyPositive(f64),

    /// `<0|Γ†(A)|1> = 0`: the limit measurement does not exist.
    #[error("observable is diagonal after decoherence: |<0|Γ†(A)|1>| = {0:.3e}")]
    DiagonalObservable(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index {index} out of range (must be < {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("Fourier inversion failed: achieved normalization {norm:.12}")]
    Inversion { norm: f64 },

    #[error("density grid too coarse or too narrow: normalization {norm:.12}")]
    Normalization { norm: f64 },

    #[error("negative density {value:.3e} at x = {x}")]
    NegativeDensity { x: f64, value: f64 },

    #[error("quadrature did not converge: residual {residual:.3e} > tolerance {tolerance:.3e}")]
    Quadrature { residual: f64, tolerance: f64 },

    #[error("truncation leak {leak:.3e} > {tolerance:.1e}; increase the Fock dimension (currently {dim})")]
    TruncationLeak { leak: f64, tolerance: f64, dim: usize },

    #[error("series did not converge after {terms} terms (last term ratio {ratio:.3e}); increase the cap")]
    Series { terms: usize, ratio: f64 },

    #[error("grids differ: {0}")]
    GridMismatch(String),

    #[error("N = {0} is too large for the explicit 2^N construction (max {1})")]
    TooLarge(usize, usize),

    #[error("characteristic function lost all precision at t = {0}")]
    PrecisionLoss(f64),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
