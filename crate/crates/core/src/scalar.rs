//! Real scalar abstraction shared by the linear-algebra, kernel-space and
//! block-operator layers.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point field the numerical core is generic over: `f32` or `f64`.
///
/// Default tolerances live here because they depend on the working precision;
/// the values for `f64` are the documented library defaults.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Relative threshold below which a singular value is treated as zero.
    fn rank_tol() -> Self;
    /// Relative tolerance for clipping slightly negative eigenvalues of PSD input.
    fn psd_tol() -> Self;
    /// Relative tolerance on `‖A − A*‖` accepted as Hermitian.
    fn herm_tol() -> Self;
    /// Minimum accepted ratio `λ_min / λ_max` of a kernel Gram matrix.
    fn cond_floor() -> Self;
    /// Absolute floor used where a relative tolerance would be scaled by zero.
    fn abs_floor() -> Self;

    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }
}

impl Real for f64 {
    fn rank_tol() -> Self {
        1e-12
    }
    fn psd_tol() -> Self {
        1e-10
    }
    fn herm_tol() -> Self {
        1e-10
    }
    fn cond_floor() -> Self {
        1e-10
    }
    fn abs_floor() -> Self {
        1e-14
    }
}

impl Real for f32 {
    fn rank_tol() -> Self {
        1e-5
    }
    fn psd_tol() -> Self {
        1e-4
    }
    fn herm_tol() -> Self {
        1e-4
    }
    fn cond_floor() -> Self {
        1e-5
    }
    fn abs_floor() -> Self {
        1e-6
    }
}

/// `x^p` with the convention `0^0 = 1`; negative inputs are clipped to zero.
pub fn pow0<T: Real>(x: T, p: T) -> T {
    if p == T::zero() {
        return T::one();
    }
    let x = x.max(T::zero());
    if x == T::zero() {
        T::zero()
    } else {
        x.powf(p)
    }
}

pub(crate) fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}
