use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("integral diverges: {0}")]
    DivergentIntegral(String),

    #[error("invalid Lévy measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid truncation level {0}: must lie in (0, 1]")]
    InvalidDelta(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("symbol vanishes on the frequency lattice at xi = {xi:?} (|p(i xi)| = {modulus:e} < {threshold:e})")]
    ZeroOnAxis {
        xi: Vec<f64>,
        modulus: f64,
        threshold: f64,
    },

    #[error("log-log fit failed: residual {residual:.4} exceeds {threshold}")]
    FitFailed { residual: f64, threshold: f64 },

    #[error("generalized inverse is unbounded at level {0}")]
    Unbounded(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("domain tag mismatch: expected {expected}, got {got}")]
    DomainTagMismatch {
        expected: &'static str,
        got: &'static str,
    },

    #[error("integrability exponent r = {0} outside [1, inf]")]
    InvalidR(f64),

    #[error("malformed field header: {0}")]
    MalformedHeader(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("not a contraction: estimated ratio {ratio:.6} >= 1")]
    NotAContraction { ratio: f64 },

    #[error("Picard iteration did not converge in {iterations} iterations (last increment {last_increment:e}, observed ratio {observed_ratio:.4})")]
    MaxIterExceeded {
        iterations: usize,
        last_increment: f64,
        observed_ratio: f64,
    },

    #[error("contraction bound violated at iteration {iteration}: observed ratio {observed:.6} > bound {bound:.6}")]
    ContractionViolated {
        iteration: usize,
        observed: f64,
        bound: f64,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors that describe a property of the mathematical problem rather than
    /// malformed input.
    pub fn is_domain_error(&self) -> bool {
        matches!(
            self,
            Error::DivergentIntegral(_)
                | Error::ZeroOnAxis { .. }
                | Error::NotAContraction { .. }
                | Error::MaxIterExceeded { .. }
                | Error::ContractionViolated { .. }
                | Error::FitFailed { .. }
                | Error::Unbounded(_)
        )
    }
}
