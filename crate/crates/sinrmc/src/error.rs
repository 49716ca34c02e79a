/// Errors produced by samplers, estimators and solvers.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A likelihood ratio is not defined for the sampled configuration,
    /// e.g. a zero tilted intensity at an occupied location.
    #[error("likelihood weight undefined: {0}")]
    WeightUndefined(String),

    /// The log-weight exceeds the overflow guard; the change of measure is
    /// too far from the base law for a stable estimate.
    #[error("tilt too aggressive: log-weight {0} exceeds the overflow guard of 700")]
    TiltTooAggressive(f64),

    /// A cross-entropy pilot observed no occurrences of the target event.
    #[error("no event hits in {0} pilot replicates; raise the pilot size or pre-tilt")]
    NoPilotHits(u64),

    #[error("solver failed: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Error {
        Error::InvalidParameter(msg.into())
    }
}
