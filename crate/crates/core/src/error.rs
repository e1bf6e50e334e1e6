use thiserror::Error;

/// Errors raised by the clustering library.
///
/// Vertex indices carried in messages are 1-based, matching every external
/// interface of the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("row {row}: expected {expected} values, found {found}")]
    Arity { row: usize, expected: usize, found: usize },

    #[error("row {row}: missing value in column `{column}`")]
    MissingValue { row: usize, column: String },

    #[error("input contains no records")]
    Empty,

    #[error("invalid header: {0}")]
    Header(String),

    #[error("schema mismatch: {0}")]
    Schema(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("vertex {0} is already a root")]
    AlreadyRoot(usize),

    #[error("vertex {0} has no active cut to restore")]
    NotCut(usize),

    #[error("no finite edges left to cut")]
    NoEdges,

    #[error("cycle detected through vertex {0}")]
    Cycle(usize),

    #[error("cluster rooted at {root} holds conflicting supervised labels `{first}` and `{second}`")]
    LabelConflict { root: usize, first: String, second: String },

    #[error("invalid in-tree: {0}")]
    InvalidTree(String),
}

pub type Result<T> = std::result::Result<T, Error>;
