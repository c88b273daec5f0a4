use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole of the kernel transform at omega = {re} + {im}i")]
    Pole { re: f64, im: f64 },

    #[error("invalid Bethe number configuration: {0}")]
    InvalidNumbers(String),

    #[error("Newton iteration did not converge after {iterations} steps (max residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("roots are not strictly ordered at index {index}: {left} >= {right}")]
    OrderViolation { index: usize, left: f64, right: f64 },

    #[error("quadrature failed: estimated error {estimate:e} exceeds tolerance {tolerance:e}")]
    Quadrature { estimate: f64, tolerance: f64 },

    #[error("sector dimension {dimension} exceeds the dense diagonalization cap {cap}")]
    DimensionTooLarge { dimension: usize, cap: usize },

    #[error("need at least {required} points, got {got}")]
    InsufficientPoints { required: usize, got: usize },

    #[error("scan failed at L = {length}: {source}")]
    Scan {
        length: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
