use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("coordinate pole: {0}")]
    Pole(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("index {0} outside 1..=4")]
    Index(usize),
    #[error("series did not converge after {iterations} terms: {what}")]
    SeriesNonConvergence { what: String, iterations: usize },
    #[error("quadrature did not converge after {subdivisions} subdivisions (estimate {estimate:e}, error {error:e})")]
    QuadratureNonConvergence { subdivisions: usize, estimate: f64, error: f64 },
    #[error("integrand returned a non-finite value at {0}")]
    NonFinite(f64),
    #[error("input violates the trace-free constraint (|trace| = {0:e})")]
    TraceViolation(f64),
    #[error("finite-difference step underflow at coordinate {0}")]
    StepUnderflow(usize),
    #[error("empty grid")]
    EmptyGrid,
    #[error("unknown check id `{0}`")]
    UnknownCheck(String),
    #[error("malformed config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, LabError>;
