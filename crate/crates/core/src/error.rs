use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = HckmError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum HckmError {
    #[error("Infeasible instance: n={n}, k={k}, u={u}")]
    Infeasible { n: usize, k: usize, u: usize },

    #[error("non-finite coordinate at position {position}")]
    NonFinite { position: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty cluster has no centroid")]
    EmptyCluster,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("representing set is empty")]
    EmptyRepresentingSet,

    #[error("transportation problem infeasible: total supply {supply} exceeds total capacity {capacity}")]
    TransportInfeasible { supply: u64, capacity: u64 },

    #[error("cost magnitude exceeds scaling range")]
    CostOverflow,

    #[error("subroutine failure: {0}")]
    Subroutine(String),

    #[error("sweep cancelled before any composition was evaluated")]
    Cancelled,

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("unknown subroutine `{0}`")]
    UnknownSubroutine(String),

    #[error("oracle search space too large: {0}")]
    OracleTooLarge(String),

    #[error("no capacity-feasible labeling exists")]
    NoFeasibleLabeling,

    #[error("sandwich violated: cost_d={cost_d} > 3 * cost_h={cost_h}")]
    SandwichViolation { cost_d: f64, cost_h: f64 },

    #[error("empty dataset")]
    EmptyDataset,

    #[error("ragged row at line {line}")]
    RaggedRow { line: u64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("io error on {path}: {source}")]
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

impl HckmError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HckmError::Io {
            path: path.into(),
            source,
        }
    }
}
