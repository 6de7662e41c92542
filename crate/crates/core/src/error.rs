use thiserror::Error;

/// Errors surfaced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A closure or enumeration grew past the configured element cap.
    #[error("element cap {cap} exceeded")]
    SizeLimit { cap: usize },

    /// A join was requested on elements that are not pairwise compatible.
    #[error("join of incompatible elements")]
    IncompatibleElements,

    /// An operation required structure the input does not have
    /// (e.g. Booleanness, a missing identity, a missing complement).
    #[error("unsupported structure: {0}")]
    Structure(String),

    /// Trace machinery refused a non-principal tight groupoid; the witness
    /// is an element with atomic support equal to its range but not equal
    /// to that atom.
    #[error("tight groupoid is not principal; isotropy witness element {witness}")]
    NotPrincipal { witness: usize },

    /// A malformed argument (out-of-range id, bad subset relation, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A Bratteli diagram violating one of the defining items.
    #[error("malformed Bratteli diagram: {0}")]
    InvalidDiagram(String),

    /// An input mean/measure that fails its defining constraints.
    #[error("validation failed: {0}")]
    Validation(String),

    /// An internal cross-check between two independent computation routes
    /// disagreed. This indicates a bug, never bad user input.
    #[error("self-check failed: {0}")]
    SelfCheck(String),
}

pub type Result<T> = std::result::Result<T, Error>;
