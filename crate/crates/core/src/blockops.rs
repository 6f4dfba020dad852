//! 2×2 block operators `T = [[S, X], [Y, R]]` on `H(Ω₁) ⊕ H(Ω₂)`, the three
//! kernel-pair Berezin functionals, and generalized Aluthge transforms.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numlin::{polar_decompose, CMatrix, LinalgError};
use crate::rkhs::{max_modulus, KernelSpace, RkhsError};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BlockError {
    #[error("block dimensions inconsistent: {0}")]
    DimensionMismatch(String),
    #[error("Aluthge parameter t = {0} outside [0, 1]")]
    BadParameter(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Rkhs(#[from] RkhsError),
}

/// Normalization of a kernel pair `(k_{λ₁}, k_{λ₂})` in the direct sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BerConvention {
    /// Each component normalized separately; the pair has norm √2.
    Pair,
    /// `(k̂₁, k̂₂)/√2`, a unit vector; equals `Pair / 2`.
    Joint,
    /// Kernels of the disjoint union: `(k̂_λ, 0)` and `(0, k̂_μ)`.
    DirectSum,
}

impl BerConvention {
    pub const ALL: [BerConvention; 3] = [BerConvention::Pair, BerConvention::Joint, BerConvention::DirectSum];

    pub fn as_str(self) -> &'static str {
        match self {
            BerConvention::Pair => "pair",
            BerConvention::Joint => "joint",
            BerConvention::DirectSum => "directsum",
        }
    }
}

impl fmt::Display for BerConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BerConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pair" => Ok(BerConvention::Pair),
            "joint" => Ok(BerConvention::Joint),
            "directsum" => Ok(BerConvention::DirectSum),
            other => Err(format!("unknown convention `{other}`")),
        }
    }
}

/// `[[S, X], [Y, R]]` with `S: n₁×n₁`, `X: n₁×n₂`, `Y: n₂×n₁`, `R: n₂×n₂`.
#[derive(Debug, Clone)]
pub struct BlockOperator<T> {
    pub s: CMatrix<T>,
    pub x: CMatrix<T>,
    pub y: CMatrix<T>,
    pub r: CMatrix<T>,
    pub space1: Arc<KernelSpace<T>>,
    pub space2: Arc<KernelSpace<T>>,
}

/// Block Berezin value with the maximizing kernel indices.
///
/// For [`BerConvention::DirectSum`] the witness is `(j, usize::MAX)` when the
/// maximum is attained at `(k̂_{λ_j}, 0)` and `(usize::MAX, j)` for `(0, k̂_{μ_j})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockBerezin<T> {
    pub value: T,
    pub witness: (usize, usize),
}

impl<T: Real> BlockOperator<T> {
    pub fn new(
        s: CMatrix<T>,
        x: CMatrix<T>,
        y: CMatrix<T>,
        r: CMatrix<T>,
        space1: Arc<KernelSpace<T>>,
        space2: Arc<KernelSpace<T>>,
    ) -> Result<Self, BlockError> {
        let block = Self {
            s,
            x,
            y,
            r,
            space1,
            space2,
        };
        block.validate()?;
        Ok(block)
    }

    /// `[[0, X], [Y, 0]]`.
    pub fn off_diagonal(
        x: CMatrix<T>,
        y: CMatrix<T>,
        space1: Arc<KernelSpace<T>>,
        space2: Arc<KernelSpace<T>>,
    ) -> Result<Self, BlockError> {
        let (n1, n2) = (space1.dim(), space2.dim());
        Self::new(CMatrix::zeros(n1, n1), x, y, CMatrix::zeros(n2, n2), space1, space2)
    }

    /// `[[S, 0], [0, R]]`.
    pub fn diagonal(
        s: CMatrix<T>,
        r: CMatrix<T>,
        space1: Arc<KernelSpace<T>>,
        space2: Arc<KernelSpace<T>>,
    ) -> Result<Self, BlockError> {
        let (n1, n2) = (space1.dim(), space2.dim());
        Self::new(s, CMatrix::zeros(n1, n2), CMatrix::zeros(n2, n1), r, space1, space2)
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.space1.dim(), self.space2.dim())
    }

    pub fn validate(&self) -> Result<(), BlockError> {
        let (n1, n2) = self.dims();
        let checks = [
            ("S", self.s.shape(), (n1, n1)),
            ("X", self.x.shape(), (n1, n2)),
            ("Y", self.y.shape(), (n2, n1)),
            ("R", self.r.shape(), (n2, n2)),
        ];
        for (name, found, expected) in checks {
            if found != expected {
                return Err(BlockError::DimensionMismatch(format!(
                    "{name} is {found:?}, expected {expected:?}"
                )));
            }
        }
        Ok(())
    }

    /// Dense `(n₁+n₂) × (n₁+n₂)` matrix.
    pub fn assemble(&self) -> Result<CMatrix<T>, BlockError> {
        self.validate()?;
        Ok(CMatrix::from_blocks(&self.s, &self.x, &self.y, &self.r)?)
    }

    /// Splits a dense matrix back into blocks over the same pair of spaces.
    pub fn from_dense(
        m: &CMatrix<T>,
        space1: Arc<KernelSpace<T>>,
        space2: Arc<KernelSpace<T>>,
    ) -> Result<Self, BlockError> {
        let (n1, n2) = (space1.dim(), space2.dim());
        if m.shape() != (n1 + n2, n1 + n2) {
            return Err(BlockError::DimensionMismatch(format!(
                "dense operator is {:?}, expected {:?}",
                m.shape(),
                (n1 + n2, n1 + n2)
            )));
        }
        Self::new(
            m.submatrix(0, 0, n1, n1),
            m.submatrix(0, n1, n1, n2),
            m.submatrix(n1, 0, n2, n1),
            m.submatrix(n1, n1, n2, n2),
            space1,
            space2,
        )
    }

    /// Blockwise adjoint `[[S*, Y*], [X*, R*]]`.
    pub fn adjoint(&self) -> Self {
        Self {
            s: self.s.adjoint(),
            x: self.y.adjoint(),
            y: self.x.adjoint(),
            r: self.r.adjoint(),
            space1: Arc::clone(&self.space1),
            space2: Arc::clone(&self.space2),
        }
    }

    /// Component-normalized pair values
    /// `S̃(λ₁) + ⟨X k̂₂, k̂₁⟩ + ⟨Y k̂₁, k̂₂⟩ + R̃(λ₂)` for every `(j₁, j₂)`,
    /// indexed `[j₁ * n₂ + j₂]`.
    pub fn pair_values(&self) -> Result<Vec<Complex<T>>, BlockError> {
        self.validate()?;
        let (n1, n2) = self.dims();
        let k1 = self.space1.normalized_kernels();
        let k2 = self.space2.normalized_kernels();
        let s_sym = self.space1.berezin_symbols(&self.s)?;
        let r_sym = self.space2.berezin_symbols(&self.r)?;
        // (j1, j2) entry of K₁* X K₂ is ⟨X k̂₂, k̂₁⟩.
        let xc = k1.adjoint().matmul(&self.x).matmul(k2);
        // (j2, j1) entry of K₂* Y K₁ is ⟨Y k̂₁, k̂₂⟩.
        let yc = k2.adjoint().matmul(&self.y).matmul(k1);
        let mut out = Vec::with_capacity(n1 * n2);
        for j1 in 0..n1 {
            for j2 in 0..n2 {
                out.push(s_sym[j1] + xc[(j1, j2)] + yc[(j2, j1)] + r_sym[j2]);
            }
        }
        Ok(out)
    }

    /// Berezin functional of the block under the given convention.
    pub fn ber(&self, conv: BerConvention) -> Result<BlockBerezin<T>, BlockError> {
        let n2 = self.space2.dim();
        match conv {
            BerConvention::Pair | BerConvention::Joint => {
                let best = max_modulus(&self.pair_values()?);
                let value = if conv == BerConvention::Joint {
                    best.value * T::lit(0.5)
                } else {
                    best.value
                };
                Ok(BlockBerezin {
                    value,
                    witness: (best.witness / n2, best.witness % n2),
                })
            }
            BerConvention::DirectSum => {
                let dense = self.assemble()?;
                let n1 = self.space1.dim();
                let kernels = CMatrix::block_diag(
                    self.space1.normalized_kernels(),
                    self.space2.normalized_kernels(),
                );
                let ak = dense.matmul(&kernels);
                let symbols: Vec<Complex<T>> = (0..n1 + n2)
                    .map(|j| {
                        (0..n1 + n2).fold(Complex::zero(), |acc, i| {
                            acc + ak[(i, j)] * kernels[(i, j)].conj()
                        })
                    })
                    .collect();
                let best = max_modulus(&symbols);
                let witness = if best.witness < n1 {
                    (best.witness, usize::MAX)
                } else {
                    (usize::MAX, best.witness - n1)
                };
                Ok(BlockBerezin {
                    value: best.value,
                    witness,
                })
            }
        }
    }
}

/// Free-function form of [`BlockOperator::ber`].
pub fn ber_block<T: Real>(
    block: &BlockOperator<T>,
    conv: BerConvention,
) -> Result<BlockBerezin<T>, BlockError> {
    block.ber(conv)
}

fn check_t<T: Real>(t: T) -> Result<(), BlockError> {
    if t >= T::zero() && t <= T::one() {
        Ok(())
    } else {
        Err(BlockError::BadParameter(t.to_f64().unwrap_or(f64::NAN)))
    }
}

/// `T̃_t = |T|^t U |T|^{1−t}` where `T = U|T|` is the polar decomposition.
///
/// `|T|^0` is the support projection of `|T|`, so `T̃_0 = T` and `T̃_1 = |T| U`.
pub fn aluthge_general<T: Real>(op: &CMatrix<T>, t: T) -> Result<CMatrix<T>, BlockError> {
    check_t(t)?;
    let polar = polar_decompose(op)?;
    let left = polar.modulus_power(t);
    let right = polar.modulus_power(T::one() - t);
    Ok(left.matmul(&polar.isometry).matmul(&right))
}

/// Closed-form Aluthge transform of `[[0, X], [Y, 0]]`:
/// `[[0, |Y|^t U |X|^{1−t}], [|X|^t V |Y|^{1−t}, 0]]` with `X = U|X|`, `Y = V|Y|`.
///
/// Only the off-diagonal blocks of `block` are used; `X` and `Y` must be square.
pub fn aluthge_offdiag<T: Real>(block: &BlockOperator<T>, t: T) -> Result<BlockOperator<T>, BlockError> {
    check_t(t)?;
    block.validate()?;
    if !block.x.is_square() || !block.y.is_square() {
        return Err(BlockError::DimensionMismatch(
            "closed-form Aluthge transform needs square X and Y".into(),
        ));
    }
    let px = polar_decompose(&block.x)?;
    let py = polar_decompose(&block.y)?;
    let upper = py
        .modulus_power(t)
        .matmul(&px.isometry)
        .matmul(&px.modulus_power(T::one() - t));
    let lower = px
        .modulus_power(t)
        .matmul(&py.isometry)
        .matmul(&py.modulus_power(T::one() - t));
    BlockOperator::off_diagonal(
        upper,
        lower,
        Arc::clone(&block.space1),
        Arc::clone(&block.space2),
    )
}
