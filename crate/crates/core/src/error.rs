use thiserror::Error;

/// Errors raised by the analysis pipeline.
///
/// Everything except [`AtlasError::Invariant`] is a property of the input;
/// `Invariant` means a structural claim the engine relies on did not hold
/// and should be reported as a bug.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AtlasError {
    #[error("support {0} is empty")]
    EmptySupport(usize),
    #[error("the tuple has no supports")]
    EmptyTuple,
    #[error("point {point:?} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        point: Vec<i64>,
        found: usize,
        expected: usize,
    },
    #[error("empty index subset")]
    EmptySubset,
    #[error("index subset covers the whole tuple")]
    FullSubset,
    #[error("index {index} out of range for a tuple of {len} supports")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("{supports} supports in a span of rank {rank}")]
    ArityMismatch { supports: usize, rank: usize },
    #[error("subset has defect {0}, expected 0")]
    NonzeroDefect(i64),
    #[error("subset has defect {0}, expected a negative defect")]
    NonnegativeDefect(i64),
    #[error("the tuple is not linearly dependent")]
    NotLinearlyDependent,
    #[error("the tuple is not a BK-tuple")]
    NotBk,
    #[error("the tuple is underdetermined (total defect {0} > 0)")]
    Underdetermined(i64),
    #[error("{supports} supports exceed the subset enumeration bound of {bound}")]
    TooLarge { supports: usize, bound: usize },
    #[error("the tuple does not contain exactly one circuit (found {0})")]
    NotUniqueCircuit(usize),
    #[error("the tuple is not an essential linearly dependent tuple")]
    NotEssentialDependent,
    #[error("oracle needs rank at most 2, got {0}")]
    RankTooHigh(usize),
    #[error("coordinate does not fit in 64 bits")]
    CoordinateOverflow,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl AtlasError {
    /// Stable machine-readable name, used in error documents.
    pub fn kind(&self) -> &'static str {
        match self {
            AtlasError::EmptySupport(_) => "EmptySupport",
            AtlasError::EmptyTuple => "EmptyTuple",
            AtlasError::DimensionMismatch { .. } => "DimensionMismatch",
            AtlasError::EmptySubset => "EmptySubset",
            AtlasError::FullSubset => "FullSubset",
            AtlasError::IndexOutOfRange { .. } => "IndexOutOfRange",
            AtlasError::ArityMismatch { .. } => "ArityMismatch",
            AtlasError::NonzeroDefect(_) => "NonzeroDefect",
            AtlasError::NonnegativeDefect(_) => "NonnegativeDefect",
            AtlasError::NotLinearlyDependent => "NotLinearlyDependent",
            AtlasError::NotBk => "NotBK",
            AtlasError::Underdetermined(_) => "Underdetermined",
            AtlasError::TooLarge { .. } => "TooLarge",
            AtlasError::NotUniqueCircuit(_) => "NotUniqueCircuit",
            AtlasError::NotEssentialDependent => "NotEssentialDependent",
            AtlasError::RankTooHigh(_) => "RankTooHigh",
            AtlasError::CoordinateOverflow => "CoordinateOverflow",
            AtlasError::Precondition(_) => "Precondition",
            AtlasError::Parse(_) => "ParseError",
            AtlasError::Invariant(_) => "InvariantViolation",
        }
    }

    pub fn is_internal(&self) -> bool {
        matches!(self, AtlasError::Invariant(_))
    }
}

pub type Result<T> = std::result::Result<T, AtlasError>;

pub(crate) fn invariant(msg: impl Into<String>) -> AtlasError {
    AtlasError::Invariant(msg.into())
}
