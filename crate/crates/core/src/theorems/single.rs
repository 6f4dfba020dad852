use num_complex::Complex;

use crate::blockops::aluthge_general;
use crate::numlin::{
    abs_power, abs_power_on_support, inner, operator_norm, psd_power, quadratic_form, vec_norm,
    CMatrix,
};
use crate::rkhs::KernelSpace;

use super::{
    exponent_r, param, require, unit_param, CertBuilder, Certificate, CheckKind, InputDigest,
    Params, TheoremError, TheoremId,
};

fn ber(space: &KernelSpace<f64>, a: &CMatrix<f64>) -> Result<(f64, usize), TheoremError> {
    let b = space.berezin_number(a)?;
    Ok((b.value, b.witness))
}

/// Per-kernel inequality `lhs_j ≤ rhs_j`; reports the kernel with least slack.
fn worst_kernel(
    b: &CertBuilder<'_>,
    values: impl Iterator<Item = (f64, f64)>,
) -> Certificate {
    let mut best: Option<(usize, f64, f64)> = None;
    for (j, (lhs, rhs)) in values.enumerate() {
        let better = match best {
            None => true,
            Some((_, l, r)) => rhs - lhs < r - l || (rhs - lhs).is_nan(),
        };
        if better {
            best = Some((j, lhs, rhs));
        }
    }
    let (j, lhs, rhs) = best.expect("spaces are nonempty");
    b.cert(0, None, lhs, rhs, vec![j])
}

/// Single-operator inequalities on one kernel space.
///
/// Parameters by id:
/// * `L21c` (`theta_grid`): `|ber(T) − max_θ ber(Re(e^{iθ}T))| ≤ (1 − cos(π/G))·ber(T)`.
/// * `P39` (`r`): `ber^{2r}(T) ≤ ½(ber^r(T²) + ‖T‖^{2r})`.
/// * `R310` (`r`): the chain `ber^{2r}(T) ≤ ½(ber^r(T²) + ‖T‖^{2r}) ≤ ½(2‖T‖^{2r}) ≤ ‖T‖^{2r}`.
/// * `T311_proof` (`r`, `young_p`, `p`): per kernel,
///   `|T̃(λ)|^{2r} ≤ ½(‖Tk̂‖^r‖T*k̂‖^r + ⟨Mk̂,k̂⟩)` with
///   `M = |T²|^{p·P·r}/P + |(T²)*|^{(1−p)·Q·r}/Q`, `P = young_p`, `1/P + 1/Q = 1`.
/// * `T311_stmt`: `ber^{2r}(T) ≤ ½(‖T‖^{2r} + ber(M))`.
/// * `T312_proof` (`nu`, `t`): `max_λ ‖Tk̂_λ‖² ≤ ((1−ν)²+ν²)ber²(T) + ν‖T−tI‖² + (1−ν)‖T−itI‖²`.
/// * `T312_stmt`: the same bound with `‖T‖²` on the left.
/// * `T32` (`t`): `ber(T) ≤ ¼‖|T|^{2t} + |T|^{2(1−t)}‖ + ½ber(T̃_t)`.
/// * `R33`: `ber(T) ≤ ½‖T‖ + ½ber(T̃_{1/2})`.
/// * `L22a` (`r`, T positive): `⟨Tk̂,k̂⟩^r ≤ ⟨T^r k̂,k̂⟩` at every kernel.
/// * `L22b` (`r`, T positive): `⟨T^{1/r}k̂,k̂⟩ ≤ ⟨Tk̂,k̂⟩^{1/r}` at every kernel.
/// * `L23` (`p`): `|⟨Tk̂_i,k̂_j⟩|² ≤ ⟨|T|^{2p}k̂_i,k̂_i⟩⟨|T*|^{2(1−p)}k̂_j,k̂_j⟩` over all pairs.
pub fn check_single(
    id: TheoremId,
    space: &KernelSpace<f64>,
    t: &CMatrix<f64>,
    params: &Params,
) -> Result<Vec<Certificate>, TheoremError> {
    if id.kind() != CheckKind::Single {
        return Err(TheoremError::WrongKind { id, expected: "single-operator" });
    }
    if t.shape() != (space.dim(), space.dim()) {
        return Err(TheoremError::Shape {
            id,
            reason: format!("operator {:?} on a space of dimension {}", t.shape(), space.dim()),
        });
    }
    let b = CertBuilder {
        id,
        params,
        digest: InputDigest::new(id, params).matrix(space.gram()).matrix(t).finish(),
    };
    let n = space.dim();
    let kernels = space.normalized_kernels();
    let column = |j: usize| kernels.column(j);

    match id {
        TheoremId::L21c => {
            let grid = param(id, params, "theta_grid")?;
            require(id, grid >= 4.0 && grid.fract() == 0.0, "theta_grid must be an integer ≥ 4")?;
            let (value, w) = ber(space, t)?;
            let rotated = space.ber_via_rotations(t, grid as usize)?;
            let rhs = (1.0 - (std::f64::consts::PI / grid).cos()) * value;
            Ok(vec![b.cert(0, None, (value - rotated).abs(), rhs, vec![w])])
        }
        TheoremId::P39 | TheoremId::R310 => {
            let r = exponent_r(id, params)?;
            let (value, w) = ber(space, t)?;
            let (sq, _) = ber(space, &t.matmul(t))?;
            let norm = operator_norm(t);
            let lhs = value.powf(2.0 * r);
            let mid = 0.5 * (sq.powf(r) + norm.powf(2.0 * r));
            let mut out = vec![b.cert(0, None, lhs, mid, vec![w])];
            if id == TheoremId::R310 {
                let both = 0.5 * (norm.powf(2.0 * r) + norm.powf(2.0 * r));
                out.push(b.cert(1, None, mid, both, vec![w]));
                out.push(b.cert(2, None, both, norm.powf(2.0 * r), vec![w]));
            }
            Ok(out)
        }
        TheoremId::T311Proof | TheoremId::T311Stmt => {
            let r = exponent_r(id, params)?;
            let p = unit_param(id, params, "p")?;
            let yp = param(id, params, "young_p")?;
            require(id, yp >= 2.0, "young_p must satisfy young_p ≥ q, i.e. young_p ≥ 2")?;
            let yq = yp / (yp - 1.0);
            require(id, yq * r >= 2.0 - 1e-12, format!("q·r = {} must be at least 2", yq * r))?;
            let t2 = t.matmul(t);
            let m = &abs_power(&t2, p * yp * r).scale_real(1.0 / yp)
                + &abs_power(&t2.adjoint(), (1.0 - p) * yq * r).scale_real(1.0 / yq);
            if id == TheoremId::T311Stmt {
                let (value, w) = ber(space, t)?;
                let (bm, _) = ber(space, &m)?;
                let rhs = 0.5 * (operator_norm(t).powf(2.0 * r) + bm);
                return Ok(vec![b.cert(0, None, value.powf(2.0 * r), rhs, vec![w])]);
            }
            let symbols = space.berezin_symbols(t)?;
            let adj = t.adjoint();
            Ok(vec![worst_kernel(
                &b,
                (0..n).map(|j| {
                    let k = column(j);
                    let lhs = symbols[j].norm().powf(2.0 * r);
                    let a = vec_norm(&t.mat_vec(&k)).powf(r) * vec_norm(&adj.mat_vec(&k)).powf(r);
                    (lhs, 0.5 * (a + quadratic_form(&m, &k).re))
                }),
            )])
        }
        TheoremId::T312Proof | TheoremId::T312Stmt => {
            let nu = unit_param(id, params, "nu")?;
            let s = param(id, params, "t")?;
            let (value, w) = ber(space, t)?;
            let shift = |c: Complex<f64>| t - &CMatrix::identity(n).scale(c);
            let rhs = ((1.0 - nu).powi(2) + nu * nu) * value * value
                + nu * operator_norm(&shift(Complex::new(s, 0.0))).powi(2)
                + (1.0 - nu) * operator_norm(&shift(Complex::new(0.0, s))).powi(2);
            if id == TheoremId::T312Stmt {
                return Ok(vec![b.cert(0, None, operator_norm(t).powi(2), rhs, vec![w])]);
            }
            let mut best = (0, 0.0f64);
            for j in 0..n {
                let v = vec_norm(&t.mat_vec(&column(j))).powi(2);
                if v > best.1 {
                    best = (j, v);
                }
            }
            Ok(vec![b.cert(0, None, best.1, rhs, vec![best.0])])
        }
        TheoremId::T32 | TheoremId::R33 => {
            let s = if id == TheoremId::R33 {
                0.5
            } else {
                unit_param(id, params, "t")?
            };
            let (value, w) = ber(space, t)?;
            let (bt, _) = ber(space, &aluthge_general(t, s)?)?;
            let first = if id == TheoremId::R33 {
                0.5 * operator_norm(t)
            } else {
                let sum = &abs_power_on_support(t, 2.0 * s) + &abs_power_on_support(t, 2.0 * (1.0 - s));
                0.25 * operator_norm(&sum)
            };
            Ok(vec![b.cert(0, None, value, first + 0.5 * bt, vec![w])])
        }
        TheoremId::L22a | TheoremId::L22b => {
            let r = exponent_r(id, params)?;
            let (power, outer) = if id == TheoremId::L22a { (r, r) } else { (1.0 / r, 1.0 / r) };
            let tp = psd_power(t, power)?;
            Ok(vec![worst_kernel(
                &b,
                (0..n).map(|j| {
                    let k = column(j);
                    let plain = quadratic_form(t, &k).re.max(0.0).powf(outer);
                    let powered = quadratic_form(&tp, &k).re;
                    if id == TheoremId::L22a {
                        (plain, powered)
                    } else {
                        (powered, plain)
                    }
                }),
            )])
        }
        TheoremId::L23 => {
            let p = unit_param(id, params, "p")?;
            let f2 = abs_power(t, 2.0 * p);
            let g2 = abs_power(&t.adjoint(), 2.0 * (1.0 - p));
            let f_diag: Vec<f64> = (0..n).map(|i| quadratic_form(&f2, &column(i)).re).collect();
            let g_diag: Vec<f64> = (0..n).map(|j| quadratic_form(&g2, &column(j)).re).collect();
            let images: Vec<_> = (0..n).map(|i| t.mat_vec(&column(i))).collect();
            let mut best: Option<(usize, usize, f64, f64)> = None;
            for i in 0..n {
                for j in 0..n {
                    let lhs = inner(&images[i], &column(j)).norm_sqr();
                    let rhs = f_diag[i] * g_diag[j];
                    if best.is_none_or(|(_, _, l, r)| rhs - lhs < r - l) {
                        best = Some((i, j, lhs, rhs));
                    }
                }
            }
            let (i, j, lhs, rhs) = best.expect("spaces are nonempty");
            Ok(vec![b.cert(0, None, lhs, rhs, vec![i, j])])
        }
        _ => unreachable!("kind checked above"),
    }
}

/// Berezin-number axioms on one space.
///
/// * `AX_HOM` (`alpha_re`, `alpha_im`; one operator): `|ber(αA) − |α|ber(A)| ≤ 0`.
/// * `AX_SUB` (two operators): `ber(A + B) ≤ ber(A) + ber(B)`.
/// * `AX_NORM` (one operator): `ber(A) ≤ ‖A‖`.
pub fn check_axiom(
    id: TheoremId,
    space: &KernelSpace<f64>,
    ops: &[CMatrix<f64>],
    params: &Params,
) -> Result<Vec<Certificate>, TheoremError> {
    if id.kind() != CheckKind::Axiom {
        return Err(TheoremError::WrongKind { id, expected: "axiom" });
    }
    let needed = if id == TheoremId::AxSub { 2 } else { 1 };
    if ops.len() != needed {
        return Err(TheoremError::Shape {
            id,
            reason: format!("expected {needed} operators, got {}", ops.len()),
        });
    }
    let digest = ops
        .iter()
        .fold(InputDigest::new(id, params).matrix(space.gram()), |d, m| d.matrix(m))
        .finish();
    let b = CertBuilder { id, params, digest };
    let a = &ops[0];
    match id {
        TheoremId::AxHom => {
            let alpha = Complex::new(param(id, params, "alpha_re")?, param(id, params, "alpha_im")?);
            let (scaled, w) = ber(space, &a.scale(alpha))?;
            let (plain, _) = ber(space, a)?;
            Ok(vec![b.cert(0, None, (scaled - alpha.norm() * plain).abs(), 0.0, vec![w])])
        }
        TheoremId::AxSub => {
            let (sum, w) = ber(space, &(a + &ops[1]))?;
            let (x, _) = ber(space, a)?;
            let (y, _) = ber(space, &ops[1])?;
            Ok(vec![b.cert(0, None, sum, x + y, vec![w])])
        }
        TheoremId::AxNorm => {
            let (value, w) = ber(space, a)?;
            Ok(vec![b.cert(0, None, value, operator_norm(a), vec![w])])
        }
        _ => unreachable!("kind checked above"),
    }
}
