//! Differentiation machinery: finite differences on the bounded axis,
//! Fourier differentiation on periodic axes.

pub mod fornberg;
pub mod fourier;
pub mod sbp;

pub use fornberg::{fd_weights, StencilOperator};
pub use fourier::FourierDiff;
pub use sbp::SbpOperator;
