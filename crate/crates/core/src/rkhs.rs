//! Finite-dimensional functional Hilbert spaces with reproducing kernels.
//!
//! A [`KernelSpace`] over `n` distinct sample points is the span of the `n`
//! kernel functions `k_λ`. Operators act on orthonormal coordinates; the
//! chart column `j` holds the coordinates of `k_{λ_j}`, so
//! `chart* · chart = gram`. The Berezin supremum is an exact maximum over the
//! finite point set.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numlin::{cholesky, hermitian_eig, inner, re_rotation, CMatrix, LinalgError};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RkhsError {
    #[error("operator of shape {found:?} does not act on a space of dimension {dim}")]
    DimensionMismatch { dim: usize, found: (usize, usize) },
    #[error("point index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("Gram matrix ill-conditioned: min/max eigenvalue ratio {0:e}")]
    IllConditioned(f64),
    #[error("duplicate sample points at positions {0} and {1}")]
    DuplicatePoints(usize, usize),
    #[error("sample point {index} is not admissible for the {family} kernel")]
    InvalidPoint { index: usize, family: KernelTag },
    #[error("invalid kernel parameter: {0}")]
    InvalidFamily(String),
    #[error("empty point set")]
    EmptyPointSet,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Kernel family name, without parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelTag {
    Identity,
    Szego,
    Bergman,
    Gaussian,
}

impl KernelTag {
    pub const ALL: [KernelTag; 4] = [
        KernelTag::Identity,
        KernelTag::Szego,
        KernelTag::Bergman,
        KernelTag::Gaussian,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            KernelTag::Identity => "identity",
            KernelTag::Szego => "szego",
            KernelTag::Bergman => "bergman",
            KernelTag::Gaussian => "gaussian",
        }
    }
}

impl fmt::Display for KernelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for KernelTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "identity" => Ok(KernelTag::Identity),
            "szego" => Ok(KernelTag::Szego),
            "bergman" => Ok(KernelTag::Bergman),
            "gaussian" => Ok(KernelTag::Gaussian),
            other => Err(format!("unknown kernel family `{other}`")),
        }
    }
}

/// Kernel family with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelFamily<T> {
    /// `k(λ_i, λ_j) = δ_ij` over abstract indices.
    Identity,
    /// Hardy space of the disk: `1 / (1 − z w̄)`.
    Szego,
    /// Bergman space of the disk: `1 / (1 − z w̄)²`.
    Bergman,
    /// `exp(−(x − y)² / (2 σ²))` on the real line.
    Gaussian { width: T },
}

impl<T: Real> KernelFamily<T> {
    pub fn tag(&self) -> KernelTag {
        match self {
            KernelFamily::Identity => KernelTag::Identity,
            KernelFamily::Szego => KernelTag::Szego,
            KernelFamily::Bergman => KernelTag::Bergman,
            KernelFamily::Gaussian { .. } => KernelTag::Gaussian,
        }
    }

    fn validate(&self) -> Result<(), RkhsError> {
        match self {
            KernelFamily::Gaussian { width } if !(*width > T::zero() && width.is_finite()) => Err(
                RkhsError::InvalidFamily(format!("gaussian width must be positive, got {width}")),
            ),
            _ => Ok(()),
        }
    }

    /// `k(z, w) = ⟨k_w, k_z⟩`.
    fn eval(&self, z: &SamplePoint<T>, w: &SamplePoint<T>) -> Complex<T> {
        let one = Complex::new(T::one(), T::zero());
        match (self, z, w) {
            (KernelFamily::Identity, SamplePoint::Index(a), SamplePoint::Index(b)) => {
                if a == b {
                    one
                } else {
                    Complex::zero()
                }
            }
            (KernelFamily::Szego, SamplePoint::Disk(a), SamplePoint::Disk(b)) => {
                one / (one - *a * b.conj())
            }
            (KernelFamily::Bergman, SamplePoint::Disk(a), SamplePoint::Disk(b)) => {
                let d = one - *a * b.conj();
                one / (d * d)
            }
            (KernelFamily::Gaussian { width }, SamplePoint::Line(x), SamplePoint::Line(y)) => {
                let d = *x - *y;
                Complex::new((-(d * d) / (T::lit(2.0) * *width * *width)).exp(), T::zero())
            }
            _ => unreachable!("points validated against the family"),
        }
    }

    fn admits(&self, p: &SamplePoint<T>) -> bool {
        match (self, p) {
            (KernelFamily::Identity, SamplePoint::Index(_)) => true,
            (KernelFamily::Szego | KernelFamily::Bergman, SamplePoint::Disk(z)) => {
                z.re.is_finite() && z.im.is_finite() && z.norm() < T::one()
            }
            (KernelFamily::Gaussian { .. }, SamplePoint::Line(x)) => x.is_finite(),
            _ => false,
        }
    }
}

/// A sample point of Ω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SamplePoint<T> {
    Index(usize),
    Disk(Complex<T>),
    Line(T),
}

/// Result of a Berezin supremum: the value and the maximizing point index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerezinNumber<T> {
    pub value: T,
    pub witness: usize,
}

#[derive(Debug, Clone)]
pub struct KernelSpace<T> {
    family: KernelFamily<T>,
    points: Vec<SamplePoint<T>>,
    gram: CMatrix<T>,
    chart: CMatrix<T>,
    /// Column `j` is `k̂_{λ_j}` in orthonormal coordinates.
    normalized: CMatrix<T>,
}

impl<T: Real> KernelSpace<T> {
    /// Builds the space spanned by the kernels at `points`.
    pub fn build(family: KernelFamily<T>, points: Vec<SamplePoint<T>>) -> Result<Self, RkhsError> {
        family.validate()?;
        if points.is_empty() {
            return Err(RkhsError::EmptyPointSet);
        }
        for (index, p) in points.iter().enumerate() {
            if !family.admits(p) {
                return Err(RkhsError::InvalidPoint {
                    index,
                    family: family.tag(),
                });
            }
        }
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if points[i] == points[j] {
                    return Err(RkhsError::DuplicatePoints(i, j));
                }
            }
        }
        let n = points.len();
        let gram = CMatrix::from_fn(n, n, |i, j| family.eval(&points[i], &points[j]));
        let eig = hermitian_eig(&gram)?;
        let lo = eig.eigenvalues[0];
        let hi = eig.eigenvalues[n - 1];
        if !(hi > T::zero()) || lo < T::cond_floor() * hi {
            let ratio = if hi > T::zero() { lo / hi } else { T::zero() };
            return Err(RkhsError::IllConditioned(ratio.to_f64().unwrap_or(f64::NAN)));
        }
        let lower = cholesky(&gram).map_err(|_| RkhsError::IllConditioned(0.0))?;
        let chart = lower.adjoint();
        let mut normalized = chart.clone();
        for j in 0..n {
            let col = chart.column(j);
            let norm = col.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
            let unit: Vec<Complex<T>> = col.iter().map(|z| *z / norm).collect();
            normalized.set_column(j, &unit);
        }
        Ok(Self {
            family,
            points,
            gram,
            chart,
            normalized,
        })
    }

    /// Identity-kernel space on `n` abstract indices.
    pub fn identity(n: usize) -> Result<Self, RkhsError> {
        Self::build(KernelFamily::Identity, (0..n).map(SamplePoint::Index).collect())
    }

    pub fn family(&self) -> &KernelFamily<T> {
        &self.family
    }

    pub fn points(&self) -> &[SamplePoint<T>] {
        &self.points
    }

    pub fn gram(&self) -> &CMatrix<T> {
        &self.gram
    }

    pub fn chart(&self) -> &CMatrix<T> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.points.len()
    }

    /// All normalized kernels as the columns of a `dim × dim` matrix.
    pub fn normalized_kernels(&self) -> &CMatrix<T> {
        &self.normalized
    }

    pub fn normalized_kernel(&self, j: usize) -> Result<Vec<Complex<T>>, RkhsError> {
        self.check_index(j)?;
        Ok(self.normalized.column(j))
    }

    fn check_index(&self, j: usize) -> Result<(), RkhsError> {
        if j >= self.dim() {
            Err(RkhsError::IndexOutOfRange {
                index: j,
                dim: self.dim(),
            })
        } else {
            Ok(())
        }
    }

    fn check_operator(&self, a: &CMatrix<T>) -> Result<(), RkhsError> {
        if a.shape() != (self.dim(), self.dim()) {
            Err(RkhsError::DimensionMismatch {
                dim: self.dim(),
                found: a.shape(),
            })
        } else {
            Ok(())
        }
    }

    /// `⟨A k̂_{λ_j}, k̂_{λ_j}⟩`.
    pub fn berezin_symbol(&self, a: &CMatrix<T>, j: usize) -> Result<Complex<T>, RkhsError> {
        self.check_operator(a)?;
        self.check_index(j)?;
        let k = self.normalized.column(j);
        Ok(inner(&a.mat_vec(&k), &k))
    }

    /// The Berezin symbol at every sample point.
    pub fn berezin_symbols(&self, a: &CMatrix<T>) -> Result<Vec<Complex<T>>, RkhsError> {
        self.check_operator(a)?;
        let ak = a.matmul(&self.normalized);
        let n = self.dim();
        Ok((0..n)
            .map(|j| {
                (0..n).fold(Complex::zero(), |acc, i| {
                    acc + ak[(i, j)] * self.normalized[(i, j)].conj()
                })
            })
            .collect())
    }

    /// `max_j |Ã(λ_j)|` with the maximizing index (lowest index on ties).
    pub fn berezin_number(&self, a: &CMatrix<T>) -> Result<BerezinNumber<T>, RkhsError> {
        let symbols = self.berezin_symbols(a)?;
        Ok(max_modulus(&symbols))
    }

    /// `max_θ ber(Re(e^{iθ} A))` over `grid` equally spaced angles in `[0, 2π)`.
    pub fn ber_via_rotations(&self, a: &CMatrix<T>, grid: usize) -> Result<T, RkhsError> {
        self.check_operator(a)?;
        let grid = grid.max(4);
        let step = T::TAU() / T::from_count(grid);
        let mut best = T::zero();
        for m in 0..grid {
            let theta = step * T::from_count(m);
            let value = self.berezin_number(&re_rotation(a, theta))?.value;
            best = best.max(value);
        }
        Ok(best)
    }
}

pub(crate) fn max_modulus<T: Real>(symbols: &[Complex<T>]) -> BerezinNumber<T> {
    let mut best = BerezinNumber {
        value: T::zero(),
        witness: 0,
    };
    for (j, s) in symbols.iter().enumerate() {
        let v = s.norm();
        if v > best.value {
            best = BerezinNumber { value: v, witness: j };
        }
    }
    best
}

/// Free-function form of [`KernelSpace::build`].
pub fn build_space<T: Real>(
    family: KernelFamily<T>,
    points: Vec<SamplePoint<T>>,
) -> Result<KernelSpace<T>, RkhsError> {
    KernelSpace::build(family, points)
}
