use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("node {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("community {0} is empty")]
    EmptyCommunity(usize),
    #[error("empty support [{min}, {max}]")]
    EmptySupport { min: usize, max: usize },
    #[error("infeasible parameters: {0}")]
    InfeasibleParams(String),
    #[error("mixing {achieved:.4} not within tolerance of target {target:.4} after rewiring")]
    RewireBudgetExceeded { achieved: f64, target: f64 },
    #[error("target community references node {0} outside the graph")]
    TargetOutOfRange(usize),
    #[error("target node set is not a community of the partition")]
    TargetNotACommunity,
    #[error("target community is empty")]
    EmptyTarget,
    #[error("target community {0} not present in partition")]
    TargetMissing(usize),
    #[error("loss became non-finite at epoch {0}")]
    DivergenceDetected(usize),
    #[error("partitions cover {0} and {1} nodes")]
    SizeMismatch(usize, usize),
    #[error("descriptor needs at least two communities")]
    SingleCommunity,
    #[error("baseline metric is zero")]
    ZeroBaseline,
    #[error("unpaired records: {0}")]
    UnpairedRows(String),
    #[error("need at least two points with strictly increasing x")]
    TooFewPoints,
    #[error("degenerate groups for trend test")]
    DegenerateGroups,
    #[error("empty input")]
    Empty,
    #[error("nothing selected to plot")]
    EmptySelection,
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
