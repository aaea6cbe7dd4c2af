use thiserror::Error;

/// Errors raised by coarsekit operations.
///
/// The variants fall into three groups that the CLI maps onto distinct exit
/// codes: input validation, certificate verification and search-size limits.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("triangle inequality violated: d({i},{k}) = {dik} > d({i},{j}) + d({j},{k}) = {sum}")]
    TriangleViolation { i: usize, j: usize, k: usize, dik: f64, sum: f64 },
    #[error("matrix is not symmetric at ({i},{j}): {dij} != {dji}")]
    Asymmetric { i: usize, j: usize, dij: f64, dji: f64 },
    #[error("graph is disconnected: point {0} is unreachable from point 0")]
    Disconnected(usize),
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error("member `{0}` is not contained in any member of the family it should refine")]
    NotARefinement(String),
    #[error("coverage violation: {0}")]
    Coverage(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("point {0} is never captured by any scale meeting the target subset")]
    Uncaptured(usize),
    #[error("chain {chain} step {step} has length {length} exceeding the scale {scale}")]
    ChainStep { chain: usize, step: usize, length: f64, scale: f64 },
    #[error("exact search limit exceeded: {size} points > limit {limit}; rerun in heuristic mode")]
    SizeLimit { size: usize, limit: usize },
    #[error("not a simplicial subdivision: {0}")]
    NotASubdivision(String),
    #[error("certificate check failed: {0}")]
    Certificate(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("I/O failure at {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the CLI: 1 validation, 2 verification, 3 size limit.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Certificate(_) => 2,
            Error::SizeLimit { .. } => 3,
            _ => 1,
        }
    }
}
