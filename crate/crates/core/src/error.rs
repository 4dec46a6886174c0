use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Shapes of a strategy, advice or table do not match the game.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A probability vector or table has a negative entry or does not normalize.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// A conditional table violates no-signaling by more than the tolerance.
    #[error("not no-signaling: {marginal} differs by {violation:e}")]
    NotNoSignaling { marginal: String, violation: f64 },

    /// The linear feasibility solver failed to terminate.
    #[error("solver error: {0}")]
    Solver(String),

    /// Bob's incentive has no sign change on the scanned Schmidt-angle range.
    #[error("no threshold for eta={eta}: delta_vB is {sign} on the whole range")]
    NoThreshold { eta: f64, sign: &'static str },

    /// Bob's incentive changes sign more than once on the scanned range.
    #[error("multiple sign changes of delta_vB for eta={eta}: {count}")]
    MultipleSignChanges { eta: f64, count: usize },

    #[error("invalid game: {0}")]
    InvalidGame(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
