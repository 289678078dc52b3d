use thiserror::Error;

/// Errors raised by the library. Every variant carries enough context to
/// point at the offending value or field.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed textual input (rationals, index lists, JSON documents).
    #[error("parse error: {0}")]
    Parse(String),

    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: expected m={expected}, got m={found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A load-sharing model cannot generate a failure order.
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// A ranking pattern contains a weak ranking function where a strict one is required.
    #[error("weak ranking function on subset {{{}}}; only non-weak patterns are supported", join(set))]
    WeakPattern { set: Vec<u8> },

    /// An epsilon schedule does not meet the conditions required by an operation.
    #[error("epsilon schedule rejected: {0}")]
    Schedule(String),

    /// A stated precondition of an operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A requested signature puts mass on a failure step no permutation reaches.
    #[error("infeasible target: step {step} carries mass {mass} but no failure order ends the system there")]
    Infeasible { step: usize, mass: String },

    /// Monte Carlo sampling reached a prefix whose total rate is zero.
    #[error("simulation error: {0}")]
    Simulation(String),

    /// Exhaustive enumeration refused because the result set is too large.
    #[error("refused: exhaustive enumeration at m={m} would produce {count} patterns; use sampling")]
    TooMany { m: usize, count: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

fn join(set: &[u8]) -> String {
    set.iter().map(u8::to_string).collect::<Vec<_>>().join(",")
}
