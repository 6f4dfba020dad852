//! Numerical laboratory for Berezin-number inequalities.
//!
//! Finite-dimensional reproducing kernel Hilbert spaces are modelled by a
//! point set, its Gram matrix and an orthonormal chart. On top of that the
//! crate computes Berezin symbols and numbers, 2×2 block operators and their
//! kernel-pair functionals, generalized Aluthge transforms, and evaluates each
//! inequality of interest as a [`theorems::Certificate`] carrying its slack.
//! The [`harness`] module runs seeded campaigns over random operator
//! ensembles and searches adversarially for small slack.
//!
//! The numerical layers ([`numlin`], [`rkhs`], [`blockops`]) are generic over
//! the [`Real`] scalar (`f32` or `f64`); certificates and campaigns work in
//! `f64` through the aliases below.

pub mod blockops;
pub mod harness;
pub mod numlin;
pub mod rkhs;
pub mod scalar;
pub mod theorems;

pub use scalar::Real;

/// Double-precision complex scalar.
pub type C64 = num_complex::Complex<f64>;

/// Double-precision dense complex matrix, the working operator type.
pub type ComplexMatrix = numlin::CMatrix<f64>;
/// Single-precision dense complex matrix.
pub type ComplexMatrix32 = numlin::CMatrix<f32>;
pub type KernelSpace = rkhs::KernelSpace<f64>;
pub type KernelFamily = rkhs::KernelFamily<f64>;
pub type BlockOperator = blockops::BlockOperator<f64>;
pub type PolarParts = numlin::PolarParts<f64>;
pub type HermitianEigen = numlin::HermitianEigen<f64>;
