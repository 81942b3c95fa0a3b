//! Dense complex linear algebra: exponentials, Schur-based eigensolver,
//! Jacobi SVD, LU inversion and Sylvester-equation kernels.
//!
//! Every routine is a pure function of its inputs.

mod eig;
pub(crate) mod extended;
mod expm;
mod lu;
pub mod matrix;
mod norms;
mod svd;
mod sylvester;

pub use eig::{eig_right, eigenvalues, hessenberg, schur, Eigen, Schur};
pub use expm::mat_exp;
pub use lu::{invert, solve_vec};
pub use matrix::{inner, vec_norm, vec_scale, vec_sub, ComplexMatrix, C64, I, ONE, ZERO};
pub use norms::operator_norm;
pub use svd::{svd, Svd};
pub use sylvester::{sylvester_kernel, sylvester_operator};
