use thiserror::Error;

/// Errors raised across the lab.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("denominator vanishes at evaluation point (|den| = {magnitude:e})")]
    PoleEvaluation { magnitude: f64 },

    #[error("zero {0} lies outside the open unit disc")]
    ZeroOutsideDisc(String),

    #[error("root finder did not converge (residual {residual:e})")]
    RootFindingDiverged { residual: f64 },

    #[error("point is not in the target domain")]
    TargetMiss,
    #[error("point is not in the domain of the model")]
    OutsideDomain,

    #[error("regular fibers disagree in size: {counts:?}")]
    InconsistentFiberCount { counts: Vec<usize> },

    #[error("no regular value found after {attempts} draws")]
    NoRegularValue { attempts: usize },

    #[error("domain is not Reinhardt")]
    NotReinhardt,

    #[error("point is within the branch-locus guard (|J| = {jacobian:e})")]
    NearBranchLocus { jacobian: f64 },

    #[error("row cap {row_cap} too small; symbol needs at least {needed}")]
    TruncationUnsafe { row_cap: usize, needed: usize },

    #[error("polynomial is not divisible (remainder {remainder:e})")]
    NotDivisible { remainder: f64 },

    #[error("polynomial is not symmetric")]
    NotSymmetric,

    #[error("unknown map `{0}`")]
    UnknownMap(String),

    #[error("unknown check `{0}`")]
    UnknownCheck(String),

    #[error("unknown kernel model `{0}`")]
    UnknownKernel(String),

    #[error("check `{check}` does not apply to map `{map}`")]
    CheckNotApplicable { check: String, map: String },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o failure: {0}")]
    IoFailure(String),
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::IoFailure(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
