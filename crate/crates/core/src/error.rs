use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A polynomial argument exceeds the ambient degree of the inner-product space.
    #[error("degree overflow: polynomial of degree {degree} does not fit in C_{n}[X]")]
    DegreeOverflow { degree: usize, n: usize },

    /// A scalar argument falls outside the interval an operation requires.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("degree too small: need degree >= {required}, got {got}")]
    DegreeTooSmall { required: usize, got: usize },

    #[error("point {index} lies outside the closed unit disk (modulus {modulus})")]
    UnitDiskViolation { index: usize, modulus: f64 },

    #[error("vanishing derivative: |P'(delta)| = {0:e}")]
    VanishingDerivative(f64),

    #[error("non-convergence after {iterations} iterations (worst residual {worst_residual:e})")]
    NonConvergence {
        iterations: usize,
        worst_residual: f64,
    },

    /// The growth constant K is not above 1, so the lower estimate does not diverge.
    #[error("invalid row: K = {k} <= 1 (a = {a}, c = {c}, m = {m})")]
    InvalidRow { a: f64, c: f64, m: f64, k: f64 },

    #[error("threshold scan exceeded the cap of {cap}")]
    ThresholdOverflow { cap: u64 },

    #[error("all rows invalid: K <= 1 for every sampled c at a = {a}")]
    AllRowsInvalid { a: f64 },

    #[error("rejection budget exhausted for region {region} after {attempts} draws")]
    RejectionBudget { region: String, attempts: u64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures of an iterative numerical method rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::ThresholdOverflow { .. }
        )
    }
}
