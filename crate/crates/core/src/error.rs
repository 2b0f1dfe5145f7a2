use thiserror::Error;

/// Errors produced by grid construction and field operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid too small on axis {axis}: stencil needs {needed} nodes, grid has {have}")]
    GridTooSmall {
        axis: usize,
        needed: usize,
        have: usize,
    },

    #[error("unsupported finite-difference order {order} (supported: 2, 4)")]
    UnsupportedOrder { order: usize },

    #[error("axis {axis} out of range for a {dim}-dimensional grid")]
    InvalidAxis { axis: usize, dim: usize },

    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("flux `{name}` provides no scalar potential; the variational route requires one")]
    MissingPotential { name: String },

    #[error("degenerate background: first component of the cross product of the gradients is zero")]
    DegenerateBackground,

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: String },

    #[error("problem diagnostics out of bounds: {context}")]
    DiagnosticsOutOfBounds { context: String },

    #[error("{context}")]
    Invalid { context: String },
}

pub type Result<T> = std::result::Result<T, Error>;
