use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed graph text. `line` is 1-based.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("vertex {vertex} out of range (graph has {vertex_count} vertices)")]
    InvalidVertex { vertex: usize, vertex_count: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("graph has {edges} edges, enumeration cap is {cap}")]
    EdgeCap { edges: usize, cap: usize },

    #[error("graph has {vertices} vertices, exact computation supports at most {cap}")]
    VertexCap { vertices: usize, cap: usize },

    #[error("exact recursion exceeded {cap} memoized states")]
    StateCap { cap: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for the cap/budget family of errors.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            Error::EdgeCap { .. } | Error::VertexCap { .. } | Error::StateCap { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
