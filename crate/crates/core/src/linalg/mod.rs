//! Dense complex linear algebra over a generic [`Real`](crate::Real) scalar.

mod completion;
mod eig;
mod matrix;
mod psd;

pub use completion::unitary_completion;
pub use eig::{herm_eig, HermEig};
pub use matrix::{gram_of, inner, kron, norm, Matrix};
pub use psd::{is_psd, min_eigenvalue, psd_sqrt, psd_sqrt_with_tol};
