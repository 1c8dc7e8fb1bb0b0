use thiserror::Error;

/// Errors produced anywhere in the toolkit.
///
/// Variants split into two families: domain errors (the caller asked for
/// something outside the model's validity region) and numerical failures
/// (the inputs were fine but a solver did not deliver). The CLI maps them to
/// exit codes 1 and 2 respectively.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("not a four-well potential: violated {violated:?}")]
    NotFourWell { violated: Vec<String> },

    #[error("outside validity window: {0}")]
    OutsideWindow(String),

    #[error("Gamma-function pole at argument {argument:e} ({context})")]
    Pole { argument: f64, context: String },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("solver collapsed to the null solution (action {action:e})")]
    NullSolution { action: f64 },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("numerical check failed: {0}")]
    CheckFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by the inputs rather than by a solver.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::NotFourWell { .. }
                | Error::OutsideWindow(_)
                | Error::Pole { .. }
        )
    }

    /// Process exit code: 1 for invalid domain, 2 for numerical or IO failure.
    pub fn exit_code(&self) -> i32 {
        if self.is_domain() {
            1
        } else {
            2
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {x}")))
    }
}
