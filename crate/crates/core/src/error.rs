//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors produced by enumeration, table construction, chain solves and
/// simulation.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the arguments was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The request would exceed a documented enumeration or state-space cap.
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// A configuration has zero normalization weight and no probability is
    /// defined for it (e.g. fewer clusters than a size bound permits).
    #[error("unreachable configuration: {0}")]
    UnreachableConfiguration(String),

    /// The birth-death chain has no usable transitions.
    #[error("degenerate chain: {0}")]
    DegenerateChain(String),

    /// A jump chain is structurally broken (absorbing state unreachable).
    #[error("structural error: {0}")]
    Structural(String),

    /// A floating-point quantity left the representable range.
    #[error("numeric overflow: {0}")]
    Overflow(String),

    /// Not enough samples to produce the requested estimate.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Malformed kernel specification or serialized input.
    #[error("parse error: {0}")]
    Parse(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
