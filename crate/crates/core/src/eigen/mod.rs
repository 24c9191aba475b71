//! Dense eigensolvers.
//!
//! All three solvers are single-threaded and deterministic; parallelism is
//! applied one level up, across ensemble members.

mod general;
mod hermitian;
mod symmetric;
mod tridiagonal;

pub use general::eig_general;
pub use hermitian::{hermitian_eig, HermitianEigen, DEGENERACY_GAP};
pub use symmetric::eig_symmetric;

/// Iteration cap for tridiagonal QR, as a multiple of the matrix order.
pub const ITERATIONS_PER_ORDER_SYMMETRIC: usize = 40;
/// Iteration cap for Hessenberg QR, as a multiple of the matrix order.
pub const ITERATIONS_PER_ORDER_GENERAL: usize = 60;

/// Relative asymmetry tolerated by [`eig_symmetric`].
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Relative non-Hermiticity tolerated by [`hermitian_eig`].
pub const HERMITIAN_TOL: f64 = 1e-12;
