use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-contract input (bad weights, bad parameters, bad files).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A point outside the region where a transform is defined.
    #[error("point off the domain: {0}")]
    Domain(String),

    /// A kernel denominator vanished at an atom.
    #[error("pole at atom {0}")]
    Pole(String),

    #[error("{stage} did not converge after {iterations} iterations (residual {residual:.3e}) at {at}")]
    NonConvergence {
        stage: &'static str,
        iterations: usize,
        residual: f64,
        at: String,
    },

    /// The chosen domain is too large for the transform (vanishing `h`, vanishing
    /// reconstruction denominator, non-real cumulants).
    #[error("degenerate domain: {0}")]
    Degenerate(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn at_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// True for errors caused by the caller's input rather than by a numerical failure.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::Invalid(_) | Error::Json(_) => true,
            Error::Stage { source, .. } => source.is_input_error(),
            _ => false,
        }
    }
}
