use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("detector index {index} out of range for {dim} detectors")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("operation requires a {expected} layout, got {got}")]
    WrongLayout { expected: &'static str, got: String },
    #[error("witness optimum sits on the magnitude cap for a = {a} (magnitudes {magnitudes:?})")]
    SolverBound { a: f64, magnitudes: Vec<f64> },
    #[error("Poisson tail mass {tail:.3e} beyond cutoff {cutoff} exceeds the {limit:.1e} budget")]
    TailMass { cutoff: usize, tail: f64, limit: f64 },
    #[error("no verdict flip inside the scan range [{lo:.3e}, {hi:.3e}]")]
    NoFlip { lo: f64, hi: f64 },
    #[error("window [{lo:.3e}, {hi:.3e}] holds {count} curve points, need at least {min}")]
    InsufficientPoints {
        lo: f64,
        hi: f64,
        count: usize,
        min: usize,
    },
    #[error("malformed curve file: {0}")]
    MalformedCurve(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
