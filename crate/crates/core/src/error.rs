//! Error type shared by all modules.

use thiserror::Error;

/// Every failure mode of the library. Numerical payloads are exported as
/// `f64` regardless of the working precision so messages stay uniform.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("signal has nonzero mean coefficient {mean:e} (tolerance 1e-10)")]
    NonZeroMean { mean: f64 },
    #[error("grid of {samples} samples is too coarse for order {order} (need at least {required})")]
    GridTooCoarse { samples: usize, order: usize, required: usize },
    #[error("profile is not a single well: {0}")]
    NotSingleWell(String),
    #[error("minimum is not at the origin: u(0) = {at_origin}, grid minimum {minimum} at x = {location}")]
    MinNotAtOrigin { at_origin: f64, minimum: f64, location: f64 },
    #[error("degenerate inflection at x = {at}: third derivative {third_derivative:e}")]
    DegenerateInflection { at: f64, third_derivative: f64 },
    #[error("adaptive quadrature did not converge on [{a}, {b}]")]
    QuadratureFailure { a: f64, b: f64 },
    #[error("quadrature budget exceeded: epsilon {epsilon:e} is below the supported floor 1e-4")]
    QuadratureBudgetExceeded { epsilon: f64 },
    #[error("interval [{a}, {b}] is outside the range [{lo}, {hi}]")]
    RangeError { a: f64, b: f64, lo: f64, hi: f64 },
    #[error("truncation N = {n} too small for signal order {order} (need N > 2K and N >= 8)")]
    TruncationTooSmall { n: usize, order: usize },
    #[error("dense Hermitian eigensolver failed at dimension {dim}")]
    EigenSolverFailure { dim: usize },
    #[error("phase chaining failed at index {index}: overlap modulus {overlap:e} below 1e-13")]
    PhaseFixFailure { index: usize, overlap: f64 },
    #[error("spectrum carries no eigenvectors")]
    MissingEigenvectors,
    #[error("zero denominator in shift-matrix formula at (n, p) = ({n}, {p})")]
    ZeroGapDivision { n: usize, p: usize },
    #[error("negative mu at index {index}: {value:e}")]
    NegativeMu { index: usize, value: f64 },
    #[error("linear solve residual {residual:e} exceeds tolerance")]
    SolveFailure { residual: f64 },
    #[error("even branch count {count} at (t, x) = ({t}, {x})")]
    EvenBranchCount { t: f64, x: f64, count: usize },
    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),
    #[error("no sign change for index {index} in window [{lo}, {hi}]")]
    BracketFailure { index: usize, lo: f64, hi: f64 },
    #[error("norm grew by a factor {ratio:.3e} by t = {t}; reduce dt")]
    BlowupDetected { t: f64, ratio: f64 },
    #[error("phase convention not validated: cosine round trip error {error:e}")]
    ConventionUnvalidated { error: f64 },
    #[error("truncation did not converge below N = {max_n} (drift {drift:e})")]
    TruncationNotConverged { max_n: usize, drift: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
