use thiserror::Error;

/// Unified error type for the crate.
///
/// Variants are grouped by what the caller can do about them: fix the
/// inputs (`AlphabetMismatch`, `RaggedLengths`, `InvalidInput`,
/// `ParameterError`), retry with more headroom (`ResourceLimit`), accept
/// that the channel exceeded the design budget (`DecodeFailure`), pick
/// different construction targets (`ConstructionFailure`), or distrust a
/// file that no longer matches its own claims (`ContractViolation`).
#[derive(Debug, Error)]
pub enum Error {
    /// Two strings (or a string and a code) carry different alphabet sizes.
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    /// An operation requiring equal-length codewords got a ragged code.
    #[error("ragged lengths: {0}")]
    RaggedLengths(String),

    /// Malformed or self-contradictory input data.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Structurally valid parameters that violate a required relation.
    #[error("parameter error: {0}")]
    ParameterError(String),

    /// Undefined arithmetic, e.g. division by zero in a finite field.
    #[error("arithmetic error: {0}")]
    Arithmetic(String),

    /// An enumeration exceeded its node budget before finishing.
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// The decoder could not return a codeword under its guarantee.
    #[error("decode failure: {0}")]
    DecodeFailure(String),

    /// A search or build could not reach the requested target.
    #[error("construction failure: {0}")]
    ConstructionFailure(String),

    /// Loaded data failed re-verification against its recorded claims.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
