use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures raised by oracles, checkers and solvers.
///
/// Hypothesis violations (`Switching`, `Continuity`, `Hypothesis`,
/// `ReductionViolation`) mean the instance does not satisfy what the
/// solver assumes; `Input` and `Domain` mean the request itself is malformed.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("evaluation failed at {point:?}: {reason}")]
    Evaluation { point: Vec<f64>, reason: String },

    #[error("switching condition violated: {0}")]
    Switching(String),

    #[error("delta-continuity violated between {a:?} and {b:?}: {detail}")]
    Continuity {
        a: Vec<i64>,
        b: Vec<i64>,
        detail: String,
    },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("grid has {points} points, above the exhaustive cap of {cap}")]
    CapExceeded { points: u128, cap: u128 },

    #[error("reduction claim violated: {0}")]
    ReductionViolation(String),
}

impl Error {
    /// Machine-readable tag used in CLI error documents.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Input(_) => "input",
            Error::Evaluation { .. } => "evaluation",
            Error::Switching(_) => "switching-violation",
            Error::Continuity { .. } => "continuity-violation",
            Error::Hypothesis(_) => "hypothesis-violation",
            Error::CapExceeded { .. } => "cap-exceeded",
            Error::ReductionViolation(_) => "reduction-violation",
        }
    }

    /// True when the instance broke a solver hypothesis, as opposed to a
    /// malformed request.
    pub fn is_hypothesis_violation(&self) -> bool {
        matches!(
            self,
            Error::Switching(_)
                | Error::Continuity { .. }
                | Error::Hypothesis(_)
                | Error::ReductionViolation(_)
                | Error::Evaluation { .. }
        )
    }
}
