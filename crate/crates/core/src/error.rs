use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed graph spec: {0}")]
    GraphSpec(String),
    #[error("vertex count {0} outside 1..=32")]
    VertexCount(usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("cannot read graph file {path}: {source}")]
    GraphFile {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid symmetry data: {0}")]
    Symmetry(String),
    #[error("enumeration supports 1..=7 vertices, got {0}")]
    EnumerationRange(usize),
    #[error("malformed variant: {0}")]
    Variant(String),
    #[error("invalid color count k={0}")]
    ColorCount(usize),
    #[error("illegal move: {0}")]
    IllegalMove(String),
    #[error("state is terminal")]
    Terminal,
    #[error("state key needs {bits} bits, more than the 192 available")]
    KeyTooWide { bits: usize },
    #[error("malformed state key: {0}")]
    MalformedKey(String),
    #[error("state budget of {budget} exceeded")]
    BudgetExceeded { budget: usize },
    #[error("state not present in the solved table")]
    UnknownState,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
