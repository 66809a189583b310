use thiserror::Error;

/// Errors surfaced by the exact kernels and the geometry pipeline.
#[derive(Debug, Error)]
pub enum HjetError {
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is rank-deficient: rank {rank} < {required}")]
    RankDeficient { rank: usize, required: usize },

    #[error("coframe is rank-deficient at the base point")]
    CoframeRankDeficient,

    #[error("first jet is not tangent to the distribution")]
    NonTangentFirstJet,

    #[error("vector does not lie in the distribution at the base point")]
    NotInDistribution,

    #[error("bracket pairing is not surjective at step {step}; input is inconsistent with bracket generation")]
    PairingNotSurjective { step: usize },

    #[error("jet order {got} is insufficient, need at least {need}")]
    InsufficientJetOrder { need: usize, got: usize },

    #[error("q = {q} is below the threshold: need n*q >= p - n with n = {n}, p = {p}")]
    QBelowThreshold { q: usize, n: usize, p: usize },

    #[error("alpha = {alpha} is below 2q = {min}")]
    AlphaBelowThreshold { alpha: usize, min: usize },

    #[error("jet is not weakly regular: {0}")]
    NotRegular(String),

    #[error("schedule index out of range: {0}")]
    ScheduleIndex(String),

    #[error("sub-frame width sum {got} does not match p(q+2) = {expected}")]
    WidthMismatch { got: usize, expected: usize },

    #[error("missing identity pivot at row {row}, column {col}")]
    MissingIdPivot { row: usize, col: usize },

    #[error("structure violation in C at row {row}, column {col}: {reason}")]
    StructureViolation {
        row: usize,
        col: usize,
        reason: String,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, HjetError>;
