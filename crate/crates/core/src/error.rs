use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex label `{0}`")]
    UnknownLabel(String),
    #[error("self-loop at `{0}`")]
    SelfLoop(String),
    #[error("duplicate vertex label `{0}`")]
    DuplicateLabel(String),
    #[error("graph is disconnected")]
    DisconnectedGraph,
    #[error("embedding does not cover source vertex `{0}`")]
    IncompleteMap(String),
    #[error("dimension {n} outside the supported range {min}..={max}")]
    DimensionOutOfRange { n: usize, min: usize, max: usize },
    #[error("unknown base graph `{0}`")]
    UnknownName(String),
    #[error("invalid base graph: {0}")]
    InvalidBase(String),
    #[error("infeasible constraints at `{0}`")]
    InfeasibleConstraints(String),
    #[error("graph has {n} vertices, limit is {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("time budget exhausted")]
    Timeout,
    #[error("corner colors differ: {0:?}")]
    CornerColorMismatch(Vec<u32>),
    #[error("block coloring is invalid: {0}")]
    InvalidBlockColoring(String),
    #[error("base k = {0} is too small, the bound needs k >= 4")]
    BaseTooSmall(u32),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing data file {0}")]
    MissingData(PathBuf),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
