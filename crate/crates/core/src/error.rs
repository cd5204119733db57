use thiserror::Error;

/// Errors raised by the geometry, group and Markov layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("numeric degeneracy: {0}")]
    NumericDegeneracy(String),

    #[error("isometry is not hyperbolic (trace {trace:.12})")]
    NotHyperbolic { trace: f64 },

    #[error("geodesics do not cross")]
    NoIntersection,

    #[error("validation error: {0}")]
    Validation(String),

    #[error("budget exceeded: {what} would need {needed}, limit is {limit}")]
    Budget {
        what: &'static str,
        needed: u128,
        limit: u128,
    },

    #[error("matrix is identically zero")]
    ZeroMatrix,

    #[error("{path}: {message}")]
    Scene { path: String, message: String },
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn scene(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Scene {
            path: path.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by exhausted size budgets rather than bad input.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
