use thiserror::Error;

/// Errors raised by scheme construction, simulation and post-processing.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("direction {direction} at node ({x}, {y}) is fed from outside the domain but no closure is registered")]
    UnclosedLink { x: usize, y: usize, direction: usize },

    #[error("no steady state after {steps} steps (last relative change {change:e})")]
    NonConvergence { steps: usize, change: f64 },

    #[error("least-squares fit needs at least 3 distinct abscissae, got {0}")]
    TooFewPoints(usize),

    #[error("degenerate fit: no curvature (|a2| = {0:e})")]
    DegenerateFit(f64),

    #[error("wall not localized: {0}")]
    WallNotLocalized(String),

    #[error("no sign change of the wall offset over [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("mode exhausted: amplitude {amplitude:e} at step {step}")]
    ModeExhausted { step: usize, amplitude: f64 },

    #[error("{context}: {source}")]
    Sample {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Wraps an error with the sweep sample or run it came from.
    pub fn in_context(self, context: impl Into<String>) -> Self {
        Error::Sample {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, with all sample annotations stripped.
    pub fn root_cause(&self) -> &Error {
        match self {
            Error::Sample { source, .. } => source.root_cause(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
