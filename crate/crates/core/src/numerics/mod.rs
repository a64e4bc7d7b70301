//! Quadrature grids, dense linear algebra and root bracketing used by both
//! solvers.
//!
//! Everything here is pure given its inputs; the routines are safe to call
//! from data-parallel parameter sweeps.

mod grid;
mod linalg;
mod roots;

pub use grid::{build_log_gauss_grid, RadialGrid};
pub use linalg::{largest_eigenvalue, lu_log_determinant, DenseMatrix, LuFactors};
pub use roots::brent_root;

pub(crate) use grid::{gauss_legendre, gauss_panels};
