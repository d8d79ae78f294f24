use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("quadrature did not reach tolerance for {context} after {doublings} panel doublings")]
    QuadratureNonConvergence { context: String, doublings: usize },

    #[error("mode sum not converged at |m| = {mode_cap} (a = {a})")]
    ModeSumNonConvergence { mode_cap: usize, a: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("exhaustive bipartition search supports at most {max} qubits, got {n}")]
    TooManyQubits { n: usize, max: usize },

    #[error("bad subset: {0}")]
    BadSubset(String),

    #[error("binomial weights are limited to n <= 64, got n = {0}")]
    BinomialRange(usize),

    #[error("curve has {0} points, at least 3 are required")]
    CurveTooShort(usize),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("sweep point a = {a} failed: {source}")]
    SweepPoint { a: f64, source: Box<Error> },
}

impl Error {
    /// True for numerical convergence failures, including those wrapped by a sweep point.
    pub fn is_convergence(&self) -> bool {
        match self {
            Error::QuadratureNonConvergence { .. } | Error::ModeSumNonConvergence { .. } => true,
            Error::SweepPoint { source, .. } => source.is_convergence(),
            _ => false,
        }
    }
}
