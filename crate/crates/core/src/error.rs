use serde::Serialize;

use crate::recognition::QuadrangleWitness;
use crate::structure::ThetaWitness;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library reports.
///
/// Serializes as a JSON object tagged by `error`, which is what the CLI
/// prints on standard error.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error, Serialize)]
#[serde(tag = "error")]
pub enum Error {
    #[error("table has {actual} entries, expected {expected}")]
    WrongLength { expected: usize, actual: usize },

    #[error("value {value} at table index {index} is out of range for order {order}")]
    ValueOutOfRange { index: usize, value: usize, order: usize },

    #[error("Latin property fails at position {position}: arguments {fixed:?} repeat value {value}")]
    LatinViolation {
        /// 1-based coordinate whose line repeats a value.
        position: usize,
        /// The other k-1 arguments, in coordinate order.
        fixed: Vec<usize>,
        value: usize,
    },

    #[error("expected {expected} arguments, got {actual}")]
    ArityMismatch { expected: usize, actual: usize },

    #[error("argument {value} is out of range for order {order}")]
    ArgumentOutOfRange { value: usize, order: usize },

    #[error("dimension mismatch: {reason}")]
    DimensionMismatch { reason: String },

    #[error("{fixings} fixings leave no residual of arity >= 2 from arity {arity}")]
    TooManyFixings { fixings: usize, arity: usize },

    #[error("position {position} is out of range for arity {arity}")]
    PositionOutOfRange { position: usize, arity: usize },

    #[error("segment ({i},{j}) is not a chord segment for arity {arity}")]
    SegmentOutOfRange { i: usize, j: usize, arity: usize },

    #[error("orders differ: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("search budget of {budget} exhausted")]
    BudgetExceeded { budget: u64 },

    #[error("precondition failed: {reason}")]
    PreconditionFailed { reason: String },

    #[error("graph is not theta-complete: v{} and v{} are joined by three disjoint paths", witness.ends.0, witness.ends.1)]
    NotThetaComplete { witness: Box<ThetaWitness> },

    #[error("malformed decomposition tree: {reason}")]
    MalformedTree { reason: String },

    #[error("operation needs a binary quasigroup, got arity {arity}")]
    NotBinary { arity: usize },

    #[error("factorization graph is not complete ({chords} of {candidates} chords present)")]
    NotFullyReducible { chords: usize, candidates: usize },

    #[error("quadrangle criterion fails")]
    CriterionFailed { witness: Box<QuadrangleWitness> },

    #[error("internal inconsistency: {reason}")]
    InternalInconsistency { reason: String },

    #[error("arity {arity} is below the minimum {minimum}")]
    ArityTooSmall { arity: usize, minimum: usize },

    #[error("invalid permutation: {reason}")]
    InvalidPermutation { reason: String },

    #[error("point classes differ in size: {left} vs {right}")]
    ClassSizeMismatch { left: usize, right: usize },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// The variant name, as used in the `error` field of the JSON form.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::WrongLength { .. } => "WrongLength",
            Error::ValueOutOfRange { .. } => "ValueOutOfRange",
            Error::LatinViolation { .. } => "LatinViolation",
            Error::ArityMismatch { .. } => "ArityMismatch",
            Error::ArgumentOutOfRange { .. } => "ArgumentOutOfRange",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::TooManyFixings { .. } => "TooManyFixings",
            Error::PositionOutOfRange { .. } => "PositionOutOfRange",
            Error::SegmentOutOfRange { .. } => "SegmentOutOfRange",
            Error::OrderMismatch { .. } => "OrderMismatch",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::PreconditionFailed { .. } => "PreconditionFailed",
            Error::NotThetaComplete { .. } => "NotThetaComplete",
            Error::MalformedTree { .. } => "MalformedTree",
            Error::NotBinary { .. } => "NotBinary",
            Error::NotFullyReducible { .. } => "NotFullyReducible",
            Error::CriterionFailed { .. } => "CriterionFailed",
            Error::InternalInconsistency { .. } => "InternalInconsistency",
            Error::ArityTooSmall { .. } => "ArityTooSmall",
            Error::InvalidPermutation { .. } => "InvalidPermutation",
            Error::ClassSizeMismatch { .. } => "ClassSizeMismatch",
            Error::Parse { .. } => "Parse",
        }
    }

    pub(crate) fn internal(reason: impl Into<String>) -> Self {
        Error::InternalInconsistency { reason: reason.into() }
    }

    pub(crate) fn precondition(reason: impl Into<String>) -> Self {
        Error::PreconditionFailed { reason: reason.into() }
    }
}
