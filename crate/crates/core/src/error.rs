use thiserror::Error;

use crate::lie::GroupId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("group mismatch: {left} vs {right}")]
    GroupMismatch { left: GroupId, right: GroupId },

    #[error("matrix is not an element of {group}: {reason}")]
    NotInAlgebra { group: GroupId, reason: String },

    #[error("matrix is not an element of the group {group}: {reason}")]
    NotInGroup { group: GroupId, reason: String },

    #[error("logarithm is ambiguous: eigenvalue near -1 (argument {argument})")]
    LogBranch { argument: f64 },

    #[error("degenerate torus vector: {0}; perturb the vector")]
    DegenerateTorusVector(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("loop is not closed")]
    OpenLoop,

    #[error("truncation too small: {0}")]
    TruncationTooSmall(String),

    #[error("constant-speed violation: speed deviates from {expected} by {deviation}")]
    ConstantSpeed { expected: f64, deviation: f64 },

    #[error("reference connection has nontrivial holonomy along the loop (deviation {0})")]
    ReferenceHolonomy(f64),

    #[error("point too close to the focal set: normal gradient norm {0}")]
    NearFocal(f64),

    #[error("empty spectrum table")]
    EmptyTable,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
