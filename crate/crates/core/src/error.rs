use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FpiError {
    #[error("pole of the gamma function at nonpositive integer {0}")]
    PoleAtNonpositiveInteger(i64),

    #[error("zero raised to a power with nonpositive real part")]
    ZeroToNonpositivePower,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported case: {0}")]
    UnsupportedCase(String),

    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),

    #[error("series did not converge within {terms} terms (last |term| = {last_term:.3e})")]
    NonConvergence { terms: usize, last_term: f64 },

    #[error("quadrature failed to reach tolerance (estimate {estimate:.3e}, error {error:.3e})")]
    QuadratureFailure { estimate: f64, error: f64 },

    #[error("least-squares fit is ill-conditioned: {0}")]
    FitIllConditioned(String),

    #[error("{side} evaluator failed: {source}")]
    EvaluatorFailure {
        side: &'static str,
        #[source]
        source: Box<FpiError>,
    },
}

impl FpiError {
    pub fn domain(msg: impl Into<String>) -> Self {
        FpiError::Domain(msg.into())
    }

    /// True for errors caused by invalid input rather than numerical trouble.
    pub fn is_domain(&self) -> bool {
        match self {
            FpiError::PoleAtNonpositiveInteger(_)
            | FpiError::ZeroToNonpositivePower
            | FpiError::Domain(_)
            | FpiError::UnsupportedCase(_)
            | FpiError::DegenerateParameters(_) => true,
            FpiError::EvaluatorFailure { source, .. } => source.is_domain(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, FpiError>;
