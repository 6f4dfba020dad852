//! Eigenvalues of general (non-Hermitian) complex matrices via Householder
//! reduction to Hessenberg form followed by single-shift complex QR.

use num_complex::Complex;
use num_traits::Zero;

use crate::scalar::Real;

use super::matrix::CMatrix;
use super::LinalgError;

const MAX_ITERS_PER_EIGENVALUE: usize = 60;

fn hessenberg<T: Real>(a: &CMatrix<T>) -> CMatrix<T> {
    let n = a.rows();
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex<T>> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        let alpha = x.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if alpha == T::zero() {
            continue;
        }
        let phase = if x[0].norm() > T::zero() {
            x[0] / x[0].norm()
        } else {
            Complex::new(T::one(), T::zero())
        };
        let mut v = x.clone();
        v[0] = v[0] + phase * alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if vnorm == T::zero() {
            continue;
        }
        for z in v.iter_mut() {
            *z = *z / vnorm;
        }
        // H ← (I − 2vv*) H (I − 2vv*) on the trailing block.
        for j in 0..n {
            let mut dot = Complex::zero();
            for (idx, vi) in v.iter().enumerate() {
                dot = dot + vi.conj() * h[(k + 1 + idx, j)];
            }
            for (idx, vi) in v.iter().enumerate() {
                h[(k + 1 + idx, j)] = h[(k + 1 + idx, j)] - *vi * dot * T::lit(2.0);
            }
        }
        for i in 0..n {
            let mut dot: Complex<T> = Complex::zero();
            for (idx, vi) in v.iter().enumerate() {
                dot = dot + h[(i, k + 1 + idx)] * *vi;
            }
            for (idx, vi) in v.iter().enumerate() {
                h[(i, k + 1 + idx)] = h[(i, k + 1 + idx)] - dot * vi.conj() * T::lit(2.0);
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = Complex::zero();
        }
    }
    h
}

fn givens<T: Real>(a: Complex<T>, b: Complex<T>) -> (T, Complex<T>, T) {
    // Returns (c, s, r) with [c s; -conj(s) c] [a; b] = [r'; 0], c real.
    let an = a.norm();
    let bn = b.norm();
    if bn == T::zero() {
        return (T::one(), Complex::zero(), an);
    }
    if an == T::zero() {
        return (T::zero(), b.conj() / bn, bn);
    }
    let r = an.hypot(bn);
    let c = an / r;
    let s = (a / an) * b.conj() / r;
    (c, s, r)
}

/// All eigenvalues of a square complex matrix (unordered).
pub fn eigenvalues<T: Real>(a: &CMatrix<T>) -> Result<Vec<Complex<T>>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare(a.shape()));
    }
    let n = a.rows();
    let mut h = hessenberg(a);
    let mut out = Vec::with_capacity(n);
    let eps = T::epsilon();
    let mut hi = n;
    let mut iters = 0;
    while hi > 0 {
        if hi == 1 {
            out.push(h[(0, 0)]);
            break;
        }
        // Find the active unreduced block [lo, hi).
        let mut lo = hi - 1;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            let floor = if diag > T::zero() { eps * diag } else { eps };
            if sub <= floor {
                h[(lo, lo - 1)] = Complex::zero();
                break;
            }
            lo -= 1;
        }
        if lo == hi - 1 {
            out.push(h[(hi - 1, hi - 1)]);
            hi -= 1;
            iters = 0;
            continue;
        }
        iters += 1;
        if iters > MAX_ITERS_PER_EIGENVALUE {
            return Err(LinalgError::NoConvergence("complex QR iteration"));
        }
        // Wilkinson shift from the trailing 2×2 block.
        let a11 = h[(hi - 2, hi - 2)];
        let a12 = h[(hi - 2, hi - 1)];
        let a21 = h[(hi - 1, hi - 2)];
        let a22 = h[(hi - 1, hi - 1)];
        let tr = a11 + a22;
        let det = a11 * a22 - a12 * a21;
        let disc = (tr * tr * T::lit(0.25) - det).sqrt();
        let half = tr * T::lit(0.5);
        let (l1, l2) = (half + disc, half - disc);
        let mut shift = if (l1 - a22).norm() < (l2 - a22).norm() { l1 } else { l2 };
        if iters % 11 == 10 {
            // Exceptional shift to break rare cycles.
            shift = shift + Complex::new(h[(hi - 1, hi - 2)].norm(), T::zero());
        }
        for i in lo..hi {
            h[(i, i)] = h[(i, i)] - shift;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..(hi - 1) {
            let (c, s, _) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..n {
                let (x, y) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
            rots.push((k, c, s));
        }
        for (k, c, s) in rots {
            for i in 0..(k + 2).min(n) {
                let (x, y) = (h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -x * s + y * c;
            }
        }
        for i in lo..hi {
            h[(i, i)] = h[(i, i)] + shift;
        }
    }
    Ok(out)
}
