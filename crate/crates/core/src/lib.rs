//! Numerical core: slab-geometry spectral/finite-difference fields, flux
//! models, a matrix-free Newton-CG minimizer for the discrete energy
//! functionals of a 2D weakly elliptic model problem and the steady 3D
//! flow problem in Clebsch form, plus numerical verification of the
//! supporting inequalities.

pub mod deriv;
pub mod error;
pub mod euler3d;
pub mod export;
pub mod field;
pub mod flux;
pub mod grid;
pub mod ineq;
pub mod norms;
pub mod solver;
pub mod toy2d;

pub use error::{Error, Result};
pub use field::{ScalarField, VectorField};
pub use grid::Grid;
