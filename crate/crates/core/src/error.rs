use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Probability mass beyond the Fock cutoff exceeds the allowed bound.
    #[error("Fock cutoff {cutoff} too small: truncated tail mass {tail:e} exceeds {bound:e}")]
    Truncation { cutoff: usize, tail: f64, bound: f64 },

    #[error("cutoff mismatch: {left} vs {right}")]
    CutoffMismatch { left: usize, right: usize },

    #[error("state is not normalized: norm² = {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    #[error("density matrix is not Hermitian (residual {residual:e})")]
    NonHermitian { residual: f64 },

    /// A postselection branch with (numerically) vanishing probability.
    #[error("branch probability {probability:e} is below the postselection floor")]
    ZeroProbability { probability: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
