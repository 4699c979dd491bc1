use thiserror::Error;

/// Everything that can go wrong while building, solving or analysing a model.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} index {index} out of range (size {size})")]
    Index {
        what: &'static str,
        index: usize,
        size: usize,
    },

    #[error("invalid model:\n  {}", .0.join("\n  "))]
    InvalidModel(Vec<String>),

    #[error("invalid belief {probs:?}: {reason}")]
    InvalidBelief { probs: Vec<f64>, reason: String },

    #[error("impossible observation {obs} from belief {belief:?} (zero likelihood)")]
    ImpossibleObservation { belief: Vec<f64>, obs: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("empty alpha-vector set")]
    EmptySet,

    #[error("controller has no successor for inner state {inner} and observation {obs}")]
    UnreachableEta { inner: usize, obs: usize },

    #[error("joint chain row {state} sums to {sum} (expected 1)")]
    ChainRow { state: usize, sum: f64 },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("power iteration did not converge after {iterations} iterations (last change {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(format!("line {} column {}: {}", e.line(), e.column(), e))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
