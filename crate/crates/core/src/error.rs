use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: duplicate edge ({u}, {v})")]
    DuplicateEdge { line: usize, u: u64, v: u64 },

    #[error("line {line}: edge probability {p} is outside (0, 1]")]
    BadProbability { line: usize, p: f64 },

    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: u64 },

    #[error("index out of range: {0}")]
    Index(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// Exhaustive enumeration refused because the subgraph is too large.
    #[error("oracle budget exceeded: subgraph has {edges} edges, limit is {max_edges}")]
    Budget { edges: usize, max_edges: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
