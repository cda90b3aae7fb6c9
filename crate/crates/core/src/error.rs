use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("target point x = {x_target} lies left of the regular endpoint a = {a}")]
    BeforeEndpoint { x_target: f64, a: f64 },

    #[error("step size underflow at x = {x} (h = {h:e})")]
    StepSizeUnderflow { x: f64, h: f64 },

    #[error("integration exceeded {max_steps} steps before reaching x = {x_target}")]
    TooManySteps { max_steps: usize, x_target: f64 },

    #[error("boundary value {value} sits on an endpoint of the target set")]
    EndpointIndeterminate { value: f64 },

    #[error("potential derivative is unavailable for {0}")]
    DerivativeUnavailable(&'static str),

    #[error("matching failed: {0}")]
    MatchingFailed(String),

    #[error("{name} did not converge for nu = {nu}, x = {x}")]
    NoConvergence { name: &'static str, nu: f64, x: f64 },

    /// A failure inside a λ-sweep, tagged with the grid point that failed.
    #[error("at lambda = {lambda}: {source}")]
    AtLambda { lambda: f64, source: Box<Error> },
}

impl Error {
    /// True for failures of the numerics (step control, matching, convergence)
    /// as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::InvalidArgument(_)
            | Error::BeforeEndpoint { .. }
            | Error::DerivativeUnavailable(_) => false,
            Error::AtLambda { source, .. } => source.is_numerical(),
            _ => true,
        }
    }

    /// The spectral parameter at which a sweep failed, if known.
    pub fn lambda(&self) -> Option<f64> {
        match self {
            Error::AtLambda { lambda, .. } => Some(*lambda),
            _ => None,
        }
    }

    pub(crate) fn at_lambda(self, lambda: f64) -> Self {
        match self {
            e @ Error::AtLambda { .. } => e,
            e => Error::AtLambda {
                lambda,
                source: Box::new(e),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
