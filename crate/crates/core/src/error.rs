use thiserror::Error;

/// Errors raised by the library.
///
/// Variants split into two families: input that could not be parsed at all
/// (`is_usage`) and well-formed input that violates a mathematical
/// precondition of the requested operation.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed group spec `{spec}`: {reason}")]
    MalformedSpec { spec: String, reason: String },

    #[error("malformed permutation `{text}`: {reason}")]
    MalformedPermutation { text: String, reason: String },

    #[error("malformed unit descriptor `{text}`: {reason}")]
    MalformedDescriptor { text: String, reason: String },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("group order exceeds the cap of {cap} elements")]
    OrderCapExceeded { cap: usize },

    #[error("element index {index} is out of range for a group of order {order}")]
    InvalidIndex { index: usize, order: usize },

    #[error("permutation {0} is not an element of the group")]
    NotInGroup(String),

    #[error("operands belong to different groups")]
    GroupMismatch,

    #[error("h = {h} is not a member of the subgroup H")]
    NotInSubgroup { h: String },

    #[error("Bass unit parameters rejected: {0}")]
    BassParameters(String),

    #[error("precondition failed: {0}")]
    ManyFpPrecondition(String),

    #[error("{which} is not of the form 1 + a with a^2 = 0")]
    NotSquareZero { which: &'static str },

    #[error("the product ab is nilpotent, so no power of the pair is free")]
    NilpotentProduct,

    #[error("cyclotomic conductors differ ({left} vs {right}); embed explicitly first")]
    ConductorMismatch { left: u32, right: u32 },

    #[error("conductor {from} does not divide {to}")]
    InvalidEmbedding { from: u32, to: u32 },

    #[error("modulus comparison undecided at {bits} bits; difference has coefficients {coeffs}")]
    PrecisionExhausted { bits: u32, coeffs: String },

    #[error("ping-pong precondition failed: {0}")]
    StauPrecondition(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("internal verification failed: {0}")]
    Verification(String),

    #[error("knowledge-base error: {0}")]
    KnowledgeBase(String),
}

impl Error {
    /// True for errors caused by unparseable input rather than a violated
    /// mathematical precondition.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::MalformedSpec { .. }
                | Error::MalformedPermutation { .. }
                | Error::MalformedDescriptor { .. }
                | Error::Parse(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
