use thiserror::Error;

use crate::domain::DomainPoint;

/// Errors raised across the lab.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point {0} is not covered by the predictor or truth")]
    UndefinedPoint(DomainPoint),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("conditioning event has zero mass")]
    ZeroMassEvent,
    #[error("empty sample")]
    EmptySample,
    #[error("no hypothesis in {0} is consistent with the training sample")]
    NoConsistentHypothesis(String),
    #[error("training sample is not realizable by {0}")]
    InconsistentTraining(String),
    #[error("class {0} exposes no oracle for this query")]
    OracleUnavailable(String),
    #[error("projection has more than {cap} behaviors")]
    ProjectionTooLarge { cap: usize },
    #[error("behavior set is not a full {0}-cube")]
    NotFullCube(usize),
    #[error("block of size {0} is too small for a collision statistic")]
    BlockTooSmall(usize),
    #[error("sample of size {size} gives blocks of {block} points over {blocks} blocks; need at least 2 per block")]
    SampleTooSmall { size: usize, blocks: usize, block: usize },
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("size cap exceeded: {0}")]
    CapExceeded(String),
    #[error("set system rejected after {retries} retries: {reason}")]
    RetryCapExceeded { retries: usize, reason: String },
    #[error("separation violated: {0}")]
    SeparationViolation(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),
    #[error("unknown component `{0}`")]
    UnknownComponent(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
