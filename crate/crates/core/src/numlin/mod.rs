//! Dense complex linear algebra over a generic real scalar.

mod functions;
mod jacobi;
mod matrix;
mod schur;

use thiserror::Error;

pub use functions::{
    abs_power, abs_power_on_support, apply_spectral_function, cholesky, inverse, matrix_abs,
    operator_norm, polar_decompose, psd_power, re_rotation, PolarParts,
};
pub use jacobi::{hermitian_eig, svd, HermitianEigen, Svd};
pub use matrix::{inner, quadratic_form, vec_norm, CMatrix};
pub use schur::eigenvalues;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("matrix of shape {0:?} is not square")]
    NotSquare((usize, usize)),
    #[error("matrix is not Hermitian (relative defect {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("matrix is singular")]
    Singular,
    #[error("non-finite entry")]
    NonFinite,
    #[error("{0} did not converge")]
    NoConvergence(&'static str),
}
