//! Crate-wide error type with stable machine-readable codes.

use thiserror::Error;

/// Errors surfaced by the analysis modules.
///
/// Every variant carries a stable code (see [`Error::code`]) so that batch
/// front-ends can report failures in machine-readable form.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("pole at {0} lies on (or within tolerance of) the unit circle")]
    PoleOnCircle(String),
    #[error("zero at {0} lies on (or within tolerance of) the unit circle")]
    ZeroOnCircle(String),
    #[error("symbol gain must be nonzero")]
    ZeroGain,
    #[error("evaluation point {0} coincides with a pole")]
    EvalAtPole(String),
    #[error("pair is not matching: {0}")]
    NotMatching(String),
    #[error("symbol is not invertible on the unit circle: {0}")]
    SymbolNotInvertibleOnCircle(String),
    #[error("function does not satisfy g·g̃ = 1: {0}")]
    NotMatchingFunction(String),
    #[error("factorization signature {0} is not ±1 within tolerance")]
    SignatureNotUnimodular(String),
    #[error("Toeplitz index {index} does not admit a {side} inverse")]
    WrongIndexForSide { index: i64, side: String },
    #[error("no inverse formula for this clause: {0}")]
    CaseUnsupported(String),
    #[error("window {window} too small for requested tolerance (tail bound {bound:.3e})")]
    TruncationTooSmall { window: usize, bound: f64 },
    #[error("vector is not in the kernel: interior residual {0:.3e}")]
    NotInKernel(f64),
    #[error("indices ({0}, {1}) are outside the scope of this operation")]
    WrongIndices(i64, i64),
    #[error("antisymmetric factorization unavailable: {0}")]
    FactorizationUnavailable(String),
    #[error("index curve passes within tolerance of the origin")]
    CurveThroughOrigin,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable short code for machine-readable error reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::PoleOnCircle(_) => "pole_on_circle",
            Error::ZeroOnCircle(_) => "zero_on_circle",
            Error::ZeroGain => "zero_gain",
            Error::EvalAtPole(_) => "eval_at_pole",
            Error::NotMatching(_) => "not_matching",
            Error::SymbolNotInvertibleOnCircle(_) => "symbol_not_invertible_on_circle",
            Error::NotMatchingFunction(_) => "not_matching_function",
            Error::SignatureNotUnimodular(_) => "signature_not_unimodular",
            Error::WrongIndexForSide { .. } => "wrong_index_for_side",
            Error::CaseUnsupported(_) => "case_unsupported",
            Error::TruncationTooSmall { .. } => "truncation_too_small",
            Error::NotInKernel(_) => "not_in_kernel",
            Error::WrongIndices(_, _) => "wrong_indices",
            Error::FactorizationUnavailable(_) => "factorization_unavailable",
            Error::CurveThroughOrigin => "curve_through_origin",
            Error::InvalidInput(_) => "invalid_input",
        }
    }
}
