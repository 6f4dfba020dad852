use num_complex::Complex;
use num_traits::Zero;

use crate::scalar::{cis, pow0, Real};

use super::jacobi::{hermitian_eig, svd, Svd};
use super::matrix::CMatrix;
use super::LinalgError;

/// Largest singular value.
pub fn operator_norm<T: Real>(a: &CMatrix<T>) -> T {
    if a.rows() == 0 || a.cols() == 0 {
        return T::zero();
    }
    // The one-sided sweep is cheaper over the shorter side.
    if a.cols() > a.rows() {
        svd(&a.adjoint()).max_singular_value()
    } else {
        svd(a).max_singular_value()
    }
}

/// `|T| = (T*T)^{1/2}`, a `cols × cols` positive semidefinite matrix.
pub fn matrix_abs<T: Real>(t: &CMatrix<T>) -> CMatrix<T> {
    svd(t).right_function(|s| s)
}

/// `|T|^a` through the singular system of `T`, with `0^0 = 1`.
///
/// Singular values below `rank_tol · σ_max` count as exact zeros, so the
/// result does not depend on rounding noise in the kernel of `T`.
pub fn abs_power<T: Real>(t: &CMatrix<T>, exponent: T) -> CMatrix<T> {
    svd(t).right_function(|s| pow0(s, exponent))
}

/// `|T|^a` with `s ↦ s^0` taken as the indicator of the support, so that
/// `|T|^0` is the projection onto `range(|T|)`.
pub fn abs_power_on_support<T: Real>(t: &CMatrix<T>, exponent: T) -> CMatrix<T> {
    svd(t).right_function(|s| support_power(s, exponent))
}

pub(crate) fn support_power<T: Real>(s: T, exponent: T) -> T {
    if s > T::zero() {
        s.powf(exponent)
    } else {
        T::zero()
    }
}

/// `Q diag(φ(max(λ, 0))) Q*` for positive semidefinite `A`.
///
/// Eigenvalues in `[−psd_tol·‖A‖, 0)` are clipped to zero; anything more
/// negative is rejected.
pub fn apply_spectral_function<T: Real>(
    a: &CMatrix<T>,
    phi: impl Fn(T) -> T,
) -> Result<CMatrix<T>, LinalgError> {
    let eig = hermitian_eig(a)?;
    let norm = eig
        .eigenvalues
        .iter()
        .fold(T::zero(), |m, l| m.max(l.abs()));
    let floor = if norm > T::zero() {
        -T::psd_tol() * norm
    } else {
        -T::abs_floor()
    };
    if let Some(&min) = eig.eigenvalues.first() {
        if min < floor {
            return Err(LinalgError::NotPsd(min.to_f64().unwrap_or(f64::NAN)));
        }
    }
    Ok(eig.reconstruct_with(|l| phi(l.max(T::zero()))))
}

/// `A^p` for positive semidefinite `A` with `0^0 = 1`.
pub fn psd_power<T: Real>(a: &CMatrix<T>, p: T) -> Result<CMatrix<T>, LinalgError> {
    apply_spectral_function(a, |l| pow0(l, p))
}

/// `Re(e^{iθ} A) = (e^{iθ} A + e^{−iθ} A*) / 2`.
pub fn re_rotation<T: Real>(a: &CMatrix<T>, theta: T) -> CMatrix<T> {
    assert!(a.is_square(), "re_rotation needs a square matrix");
    let w = cis(theta);
    let adj = a.adjoint();
    let half = T::lit(0.5);
    CMatrix::from_fn(a.rows(), a.cols(), |i, j| {
        (w * a[(i, j)] + w.conj() * adj[(i, j)]) * half
    })
}

/// Polar decomposition `T = U |T|` with `ker U = ker |T|`.
#[derive(Clone, Debug)]
pub struct PolarParts<T> {
    pub isometry: CMatrix<T>,
    pub modulus: CMatrix<T>,
    svd: Svd<T>,
}

impl<T: Real> PolarParts<T> {
    /// `|T|^a`, with `|T|^0` the support projection `U*U`.
    pub fn modulus_power(&self, exponent: T) -> CMatrix<T> {
        self.svd.right_function(|s| support_power(s, exponent))
    }

    pub fn singular_values(&self) -> &[T] {
        &self.svd.singular_values
    }

    pub fn rank(&self) -> usize {
        self.svd.rank()
    }
}

pub fn polar_decompose<T: Real>(t: &CMatrix<T>) -> Result<PolarParts<T>, LinalgError> {
    if !t.is_square() {
        return Err(LinalgError::NotSquare(t.shape()));
    }
    let n = t.rows();
    let dec = svd(t);
    let thr = dec.support_threshold();
    let mut isometry = CMatrix::zeros(n, n);
    for (k, &s) in dec.singular_values.iter().enumerate() {
        if s <= thr {
            continue;
        }
        for i in 0..n {
            let uik = dec.u[(i, k)];
            for j in 0..n {
                isometry[(i, j)] = isometry[(i, j)] + uik * dec.v[(j, k)].conj();
            }
        }
    }
    let modulus = dec.right_function(|s| s);
    Ok(PolarParts {
        isometry,
        modulus,
        svd: dec,
    })
}

/// Lower-triangular `L` with `A = L L*` for Hermitian positive definite `A`.
pub fn cholesky<T: Real>(a: &CMatrix<T>) -> Result<CMatrix<T>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare(a.shape()));
    }
    let n = a.rows();
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d = d - l[(j, k)].norm_sqr();
        }
        if d <= T::zero() {
            return Err(LinalgError::NotPositiveDefinite);
        }
        let d = d.sqrt();
        l[(j, j)] = Complex::new(d, T::zero());
        for i in (j + 1)..n {
            let mut acc = a[(i, j)];
            for k in 0..j {
                acc = acc - l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = acc / d;
        }
    }
    Ok(l)
}

/// Inverse by Gauss–Jordan elimination with partial pivoting.
pub fn inverse<T: Real>(a: &CMatrix<T>) -> Result<CMatrix<T>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare(a.shape()));
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut inv = CMatrix::identity(n);
    let scale = a.max_abs();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[(i, col)].norm().partial_cmp(&m[(j, col)].norm()).expect("finite"))
            .expect("non-empty range");
        if m[(pivot, col)].norm() <= T::epsilon() * scale {
            return Err(LinalgError::Singular);
        }
        if pivot != col {
            for j in 0..n {
                let tmp = m[(col, j)];
                m[(col, j)] = m[(pivot, j)];
                m[(pivot, j)] = tmp;
                let tmp = inv[(col, j)];
                inv[(col, j)] = inv[(pivot, j)];
                inv[(pivot, j)] = tmp;
            }
        }
        let p = m[(col, col)];
        for j in 0..n {
            m[(col, j)] = m[(col, j)] / p;
            inv[(col, j)] = inv[(col, j)] / p;
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let f = m[(i, col)];
            if f.is_zero() {
                continue;
            }
            for j in 0..n {
                m[(i, j)] = m[(i, j)] - f * m[(col, j)];
                inv[(i, j)] = inv[(i, j)] - f * inv[(col, j)];
            }
        }
    }
    Ok(inv)
}
