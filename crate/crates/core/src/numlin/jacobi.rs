//! Cyclic Jacobi machinery: Hermitian eigendecomposition and one-sided
//! (Hestenes) SVD. Both are accurate to working precision for the small dense
//! matrices this crate handles, and both report tiny eigen/singular values with
//! good relative accuracy.

use num_complex::Complex;
use num_traits::Zero;

use crate::scalar::Real;

use super::matrix::{inner, vec_norm, CMatrix};
use super::LinalgError;

const MAX_SWEEPS: usize = 100;

/// 2×2 unitary `J` with `J* [[app, apq], [conj(apq), aqq]] J` diagonal.
#[derive(Clone, Copy, Debug)]
struct Rotation<T> {
    pp: Complex<T>,
    pq: Complex<T>,
    qp: Complex<T>,
    qq: Complex<T>,
}

impl<T: Real> Rotation<T> {
    fn annihilating(app: T, aqq: T, apq: Complex<T>) -> Self {
        let mag = apq.norm();
        let phase = if mag > T::zero() {
            apq.conj() / mag
        } else {
            Complex::new(T::one(), T::zero())
        };
        let tau = (aqq - app) / (mag + mag);
        let sign = if tau >= T::zero() { T::one() } else { -T::one() };
        let t = sign / (tau.abs() + (T::one() + tau * tau).sqrt());
        let c = T::one() / (T::one() + t * t).sqrt();
        let s = t * c;
        Self {
            pp: Complex::new(c, T::zero()),
            pq: Complex::new(s, T::zero()),
            qp: phase * (-s),
            qq: phase * c,
        }
    }

    /// `A[:, (p, q)] ← A[:, (p, q)] J`.
    fn apply_right(&self, a: &mut CMatrix<T>, p: usize, q: usize) {
        for i in 0..a.rows() {
            let (x, y) = (a[(i, p)], a[(i, q)]);
            a[(i, p)] = x * self.pp + y * self.qp;
            a[(i, q)] = x * self.pq + y * self.qq;
        }
    }

    /// `A[(p, q), :] ← J* A[(p, q), :]`.
    fn apply_left_adjoint(&self, a: &mut CMatrix<T>, p: usize, q: usize) {
        for k in 0..a.cols() {
            let (x, y) = (a[(p, k)], a[(q, k)]);
            a[(p, k)] = self.pp.conj() * x + self.qp.conj() * y;
            a[(q, k)] = self.pq.conj() * x + self.qq.conj() * y;
        }
    }
}

/// Eigendecomposition `A = Q diag(λ) Q*` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T> {
    /// Ascending.
    pub eigenvalues: Vec<T>,
    /// Unitary; column `j` pairs with `eigenvalues[j]`.
    pub eigenvectors: CMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    /// `Q diag(φ(λ)) Q*`.
    pub fn reconstruct_with(&self, phi: impl Fn(T) -> T) -> CMatrix<T> {
        let q = &self.eigenvectors;
        let n = q.rows();
        let weights: Vec<T> = self.eigenvalues.iter().map(|&l| phi(l)).collect();
        CMatrix::from_fn(n, n, |i, j| {
            let mut acc = Complex::zero();
            for (k, w) in weights.iter().enumerate() {
                if *w != T::zero() {
                    acc = acc + q[(i, k)] * q[(j, k)].conj() * *w;
                }
            }
            acc
        })
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Fails with [`LinalgError::NotHermitian`] when `‖A − A*‖_F > herm_tol·‖A‖_F`;
/// otherwise the Hermitian part of `A` is decomposed.
pub fn hermitian_eig<T: Real>(a: &CMatrix<T>) -> Result<HermitianEigen<T>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare(a.shape()));
    }
    let scale = a.frobenius_norm();
    let defect = (a - &a.adjoint()).frobenius_norm();
    if defect > T::herm_tol() * scale.max(T::abs_floor()) {
        let ratio = if scale > T::zero() { defect / scale } else { defect };
        return Err(LinalgError::NotHermitian(ratio.to_f64().unwrap_or(f64::NAN)));
    }
    let n = a.rows();
    let mut m = a.hermitian_part();
    let mut q = CMatrix::identity(n);
    for i in 0..n {
        m[(i, i)] = Complex::new(m[(i, i)].re, T::zero());
    }
    let eps = T::epsilon();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for r in (p + 1)..n {
                let apq = m[(p, r)];
                let mag = apq.norm();
                if mag == T::zero() {
                    continue;
                }
                let app = m[(p, p)].re;
                let arr = m[(r, r)].re;
                if mag <= eps * (app.abs() * arr.abs()).sqrt() || mag < T::min_positive_value() {
                    m[(p, r)] = Complex::zero();
                    m[(r, p)] = Complex::zero();
                    continue;
                }
                let rot = Rotation::annihilating(app, arr, apq);
                rot.apply_right(&mut m, p, r);
                rot.apply_left_adjoint(&mut m, p, r);
                rot.apply_right(&mut q, p, r);
                m[(p, r)] = Complex::zero();
                m[(r, p)] = Complex::zero();
                m[(p, p)] = Complex::new(m[(p, p)].re, T::zero());
                m[(r, r)] = Complex::new(m[(r, r)].re, T::zero());
                rotated = true;
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).expect("finite"));
    let eigenvalues = order.iter().map(|&i| m[(i, i)].re).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |i, j| q[(i, order[j])]);
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors,
    })
}

/// Singular system `A V = U Σ` of an `m × n` matrix.
///
/// `v` is a full `n × n` unitary and `singular_values` has `n` entries in
/// descending order (trailing ones are zero when `n > m`). Column `j` of `u`
/// is the left singular vector for `σ_j > 0` and zero otherwise.
#[derive(Clone, Debug)]
pub struct Svd<T> {
    pub u: CMatrix<T>,
    pub singular_values: Vec<T>,
    pub v: CMatrix<T>,
}

impl<T: Real> Svd<T> {
    pub fn max_singular_value(&self) -> T {
        self.singular_values.first().copied().unwrap_or_else(T::zero)
    }

    /// Singular values at or below `rank_tol · σ_max` are treated as zero.
    pub fn support_threshold(&self) -> T {
        T::rank_tol() * self.max_singular_value()
    }

    pub fn rank(&self) -> usize {
        let thr = self.support_threshold();
        self.singular_values.iter().filter(|&&s| s > thr).count()
    }

    /// `V diag(φ(σ_j)) V*`, where `σ_j` below the support threshold is passed
    /// to `φ` as exactly zero.
    pub fn right_function(&self, phi: impl Fn(T) -> T) -> CMatrix<T> {
        let thr = self.support_threshold();
        let weights: Vec<T> = self
            .singular_values
            .iter()
            .map(|&s| if s > thr { phi(s) } else { phi(T::zero()) })
            .collect();
        let v = &self.v;
        let n = v.rows();
        CMatrix::from_fn(n, n, |i, j| {
            let mut acc = Complex::zero();
            for (k, w) in weights.iter().enumerate() {
                if *w != T::zero() {
                    acc = acc + v[(i, k)] * v[(j, k)].conj() * *w;
                }
            }
            acc
        })
    }
}

/// One-sided Jacobi SVD.
pub fn svd<T: Real>(a: &CMatrix<T>) -> Svd<T> {
    let (m, n) = a.shape();
    let mut cols: Vec<Vec<Complex<T>>> = (0..n).map(|j| a.column(j)).collect();
    let mut v = CMatrix::identity(n);
    let eps = T::epsilon();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: T = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: T = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma = inner(&cols[q], &cols[p]);
                let mag = gamma.norm();
                if mag <= eps * (alpha * beta).sqrt() || mag < T::min_positive_value() {
                    continue;
                }
                let rot = Rotation::annihilating(alpha, beta, gamma);
                for i in 0..m {
                    let (x, y) = (cols[p][i], cols[q][i]);
                    cols[p][i] = x * rot.pp + y * rot.qp;
                    cols[q][i] = x * rot.pq + y * rot.qq;
                }
                rot.apply_right(&mut v, p, q);
                rotated = true;
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<T> = cols.iter().map(|c| vec_norm(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).expect("finite"));
    let singular_values: Vec<T> = order.iter().map(|&k| norms[k]).collect();
    let v_sorted = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    let mut u = CMatrix::zeros(m, n);
    for (j, &k) in order.iter().enumerate() {
        let s = norms[k];
        if s > T::zero() {
            let col: Vec<Complex<T>> = cols[k].iter().map(|z| *z / s).collect();
            u.set_column(j, &col);
        }
    }
    Svd {
        u,
        singular_values,
        v: v_sorted,
    }
}
