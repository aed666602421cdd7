use num_complex::Complex64;
use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("conformal parameter has non-positive imaginary part: {0}")]
    NonPositiveImaginaryPart(Complex64),
    #[error("evaluation point {z} is within {radius} of a pole")]
    PoleAtInput { z: Complex64, radius: f64 },
    #[error("pole residues sum to {0}, expected 0")]
    ResiduesDoNotSumToZero(Complex64),
    #[error("pole locations {0} and {1} coincide modulo the lattice")]
    DuplicatePoles(Complex64, Complex64),
    #[error("{0} is within tolerance of a critical value of wp")]
    CriticalValue(Complex64),
    #[error("zero of shifted block at {0} has multiplicity >= 2")]
    NonSimpleZero(Complex64),
    #[error("another pole lies within the integration contour around {0}")]
    ContourHitsPole(Complex64),
    #[error("root polishing failed to converge: {0}")]
    ConvergenceFailure(String),
    #[error("sampled basis is ill-conditioned (cond = {0:.3e})")]
    IllConditionedBasis(f64),
    #[error("randomized search exhausted after {0} retries: {1}")]
    RetryExhausted(usize, String),
    #[error("unexpected preimage of the density point near {0}")]
    UnexpectedPreimage(Complex64),
    #[error("chart balls cannot be packed disjointly (delta = {0})")]
    ChartPackingFailure(f64),
    #[error("metric sample at {0} is not positive definite")]
    NonPositiveDefiniteMetric(Complex64),
    #[error("elliptic solver diverged: {0}")]
    SolverDivergence(String),
    #[error("Newton continuation diverged: {0}")]
    NewtonDivergence(String),
    #[error("differential is degenerate at {0}")]
    DegeneratePoint(Complex64),
    #[error("quadrature refinement budget exceeded ({0} tiles)")]
    RefinementBudgetExceeded(usize),
    #[error("integration path passes too close to a pole (distance {0:.3e})")]
    PathHitsPole(f64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
