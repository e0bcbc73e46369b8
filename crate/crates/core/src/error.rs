use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    Domain(String),

    #[error("unknown domain family `{0}`")]
    UnknownFamily(String),

    #[error("boundary sampling too coarse: arc receives {samples} samples, at least 8 required")]
    SamplingTooCoarse { samples: usize },

    #[error("ray origin ({x}, {y}) is not interior to the domain")]
    OriginNotInterior { x: f64, y: f64 },

    #[error("meshing failed: {0}")]
    Meshing(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("point ({x}, {y}) not found in mesh")]
    PointNotFound { x: f64, y: f64 },

    #[error("degenerate stencil at node {node}: {reason}")]
    Stencil { node: usize, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
