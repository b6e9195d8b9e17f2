use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("division by zero")]
    DivisionByZero,

    /// The exact rational domain cannot hold the requested value (e.g. `2^(1/2)`).
    #[error("{0} is not representable exactly; use float or eps-jet mode")]
    NotRepresentable(String),

    #[error("resonant multiplier: s^{k} = s")]
    Resonance { k: usize },

    #[error("no fixed point at origin: f1(0) = {0}")]
    NoFixedPoint(String),

    #[error("numeric overflow: {0}")]
    Overflow(String),

    #[error("unknown catalog map `{0}`")]
    UnknownMap(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// A result that exact arithmetic says cannot happen, e.g. an ε-pole
    /// surviving in a flow coefficient.
    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
