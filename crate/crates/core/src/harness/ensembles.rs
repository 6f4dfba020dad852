//! Seeded random operator ensembles.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::numlin::{operator_norm, polar_decompose, CMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Ginibre,
    Hermitian,
    Psd,
    Unitary,
    PartialIsometry,
    Contraction,
    Nilpotent,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 7] = [
        OperatorKind::Ginibre,
        OperatorKind::Hermitian,
        OperatorKind::Psd,
        OperatorKind::Unitary,
        OperatorKind::PartialIsometry,
        OperatorKind::Contraction,
        OperatorKind::Nilpotent,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OperatorKind::Ginibre => "ginibre",
            OperatorKind::Hermitian => "hermitian",
            OperatorKind::Psd => "psd",
            OperatorKind::Unitary => "unitary",
            OperatorKind::PartialIsometry => "partial_isometry",
            OperatorKind::Contraction => "contraction",
            OperatorKind::Nilpotent => "nilpotent",
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OperatorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OperatorKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown operator kind `{s}`"))
    }
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Standard complex Gaussian entries, `E|z|² = 1`.
pub fn sample_ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix<f64> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re = normal(rng);
        let im = normal(rng);
        Complex::new(re * scale, im * scale)
    })
}

/// Ginibre matrix rescaled to norm `u ≤ 1` with `u` uniform on `(0, 1]`.
pub fn sample_contraction<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix<f64> {
    let g = sample_ginibre(rng, rows, cols);
    let u: f64 = 1.0 - rng.random::<f64>();
    let norm = operator_norm(&g);
    if norm == 0.0 {
        g
    } else {
        g.scale_real(u / norm)
    }
}

/// Draws one square operator of the given kind.
pub fn sample_operator<R: Rng + ?Sized>(rng: &mut R, kind: OperatorKind, dim: usize) -> CMatrix<f64> {
    match kind {
        OperatorKind::Ginibre => sample_ginibre(rng, dim, dim),
        OperatorKind::Hermitian => sample_ginibre(rng, dim, dim).hermitian_part(),
        OperatorKind::Psd => {
            let g = sample_ginibre(rng, dim, dim);
            g.adjoint().matmul(&g).hermitian_part()
        }
        OperatorKind::Unitary => unitary(rng, dim),
        OperatorKind::PartialIsometry => {
            let u = unitary(rng, dim);
            let rank = rng.random_range(0..=dim);
            let mut idx: Vec<usize> = (0..dim).collect();
            idx.shuffle(rng);
            let mut mask = vec![0.0; dim];
            for &i in &idx[..rank] {
                mask[i] = 1.0;
            }
            u.matmul(&CMatrix::diag_real(&mask))
        }
        OperatorKind::Contraction => sample_contraction(rng, dim, dim),
        OperatorKind::Nilpotent => {
            let g = sample_ginibre(rng, dim, dim);
            CMatrix::from_fn(dim, dim, |i, j| if j > i { g[(i, j)] } else { Complex::new(0.0, 0.0) })
        }
    }
}

fn unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix<f64> {
    // A Ginibre draw is almost surely invertible; redraw in the null event.
    loop {
        let g = sample_ginibre(rng, dim, dim);
        let polar = polar_decompose(&g).expect("square by construction");
        if polar.rank() == dim {
            return polar.isometry;
        }
    }
}

/// Deterministic in `(kind, dim, seed)`.
pub fn generate_operator(kind: OperatorKind, dim: usize, seed: u64) -> CMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_operator(&mut rng, kind, dim)
}

/// Rectangular Ginibre matrix, deterministic in `(rows, cols, seed)`.
pub fn ginibre_rect(rows: usize, cols: usize, seed: u64) -> CMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_ginibre(&mut rng, rows, cols)
}
