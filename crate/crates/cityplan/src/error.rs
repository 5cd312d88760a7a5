//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("xml parse error at line {line}: {message}")]
    XmlParse { line: usize, message: String },

    #[error("fixture parse error: {0}")]
    Fixture(String),

    #[error("network contains no drivable ways")]
    EmptyNetwork,

    #[error("edge {edge} references undeclared node {node}")]
    DanglingNode { edge: String, node: String },

    #[error("duplicate node id {0}")]
    DuplicateNode(String),

    #[error("network is not strongly connected; component sizes {sizes:?}")]
    NotStronglyConnected { sizes: Vec<usize> },

    #[error("unknown node id {0}")]
    UnknownNode(String),

    #[error("grid {rows}x{cols} exceeds the cell budget of {budget}")]
    GridTooLarge {
        rows: usize,
        cols: usize,
        budget: usize,
    },

    #[error("grid state mismatch: {0}")]
    GridState(String),

    #[error("neighborhood average requested for the cell's own edge")]
    OwnNeighborhood,

    #[error("no developable cells on this map")]
    NoDevelopableCells,

    #[error("episode is already terminal")]
    EpisodeFinished,

    #[error("state shape mismatch: network expects {expected}x{expected}x6, got {got}x{got}x6")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("weight file: {0}")]
    WeightFormat(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code the CLI maps this error to.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            _ => 1,
        }
    }
}
