//! Perfect and probabilistic NOT / conjugate transformations on finite sets
//! of pure states.
//!
//! The crate decides when a set of qubit states admits a perfect NOT gate
//! (or a set of qudit states a perfect conjugation), with or without a probe,
//! builds explicit probabilistic machines (a joint unitary on system ⊗ probe
//! plus a postselected probe measurement) for linearly independent sets,
//! simulates them, and bounds or searches the achievable success
//! efficiencies.
//!
//! The dense linear algebra in [`linalg`] and the state types in [`states`]
//! are generic over the [`Real`] scalar; the machine-level modules work in
//! `f64` through the aliases below.

pub mod error;
pub mod feasibility;
pub mod io;
pub mod linalg;
pub mod optimizer;
pub mod scalar;
pub mod simulator;
pub mod states;
pub mod synthesis;

pub use error::{Error, Result};
pub use scalar::Real;
pub use states::TargetMap;

/// Complex scalar at double precision.
pub type C64 = num_complex::Complex<f64>;

pub type CMatrix = linalg::Matrix<f64>;
pub type CMatrix32 = linalg::Matrix<f32>;
pub type HermEig = linalg::HermEig<f64>;
pub type QuditState = states::Ket<f64>;
pub type QuditState32 = states::Ket<f32>;
pub type StateSet = states::KetSet<f64>;
pub type StateSet32 = states::KetSet<f32>;
pub type GramMatrix = states::Gram<f64>;
