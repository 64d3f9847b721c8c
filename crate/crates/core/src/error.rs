//! Crate-wide error type.

/// Errors produced anywhere in the laboratory.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid configuration: bad parameters, malformed config files,
    /// unknown presets.
    #[error("config error: {0}")]
    Config(String),

    /// An argument outside an operation's domain (e.g. a moment order
    /// larger than the spin count).
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical routine failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// An exhaustive enumeration would exceed the desk-scale budget.
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    /// Wrapped I/O error from report emission.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
