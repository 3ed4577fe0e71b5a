use thiserror::Error;

use crate::graph::Vertex;

/// Errors raised by graph queries, oracles and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for ground set of size {n}")]
    VertexOutOfRange { vertex: Vertex, n: usize },

    #[error("no path from {from} to {to}")]
    NoPath { from: Vertex, to: Vertex },

    #[error("invalid tree structure: {0}")]
    Structure(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("size error: {0}")]
    Size(String),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("subroutine contract violated: {0}")]
    Contract(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
