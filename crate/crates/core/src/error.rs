use thiserror::Error;

/// Errors raised by the engine.
///
/// The variants mirror the failure classes a caller can act on: a bad ring
/// description, an argument outside an operation's domain, a request outside
/// the regime a closed-form path covers, or a brute-force size cap.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// The ring description is malformed or unsupported.
    #[error("configuration error: {0}")]
    Config(String),

    /// The argument violates an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// A closed-form path does not cover the request; use the brute-force path.
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    /// A brute-force enumeration would exceed the configured cap.
    #[error("size cap exceeded: {size} > {cap}")]
    CapExceeded { size: u64, cap: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
