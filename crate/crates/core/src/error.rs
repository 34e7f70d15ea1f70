use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input text; `line` is 1-based.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("no such vertex: {0}")]
    NoSuchVertex(String),

    #[error("vertex set is not hereditary")]
    NotHereditary,

    #[error("{what}: {actual} exceeds bound {limit}")]
    BoundExceeded {
        what: &'static str,
        limit: usize,
        actual: usize,
    },

    #[error("graph fails Condition (K) and strict mode is enabled")]
    ConditionK,

    /// A vertex of the quotient carrier whose regularity status differs
    /// between the pair and triple presentations. Only possible for inputs
    /// that are neither row-finite nor amplified.
    #[error("subquotient convention violated at vertex {vertex}")]
    ConventionViolation { vertex: String },

    #[error("invalid subquotient key: {0}")]
    InvalidKey(String),

    #[error("ill-defined homomorphism: a domain relation is not preserved")]
    IllDefinedHom,

    #[error("homomorphism composition mismatch: {0}")]
    HomMismatch(String),

    #[error("move hypothesis violated: {0}")]
    MoveHypothesis(String),

    #[error("vertex {0} is not a source")]
    NotASource(String),

    #[error("lattice isomorphism search budget exceeded")]
    IsoSearchBudget,

    /// An internal invariant failed. Results must never be emitted in this
    /// state; it indicates a bug, not bad input.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
