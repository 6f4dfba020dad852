use std::sync::Arc;

use crate::blockops::{aluthge_general, BerConvention, BlockBerezin, BlockOperator};
use crate::numlin::{abs_power, abs_power_on_support, matrix_abs, operator_norm, quadratic_form, CMatrix};
use crate::rkhs::KernelSpace;

use super::{
    exponent_r, param, unit_param, CertBuilder, Certificate, CheckKind, InputDigest, Params,
    TheoremError, TheoremId,
};

fn ber(space: &KernelSpace<f64>, a: &CMatrix<f64>) -> Result<f64, TheoremError> {
    Ok(space.berezin_number(a)?.value)
}

fn indices(b: &BlockBerezin<f64>) -> Vec<usize> {
    vec![b.witness.0, b.witness.1]
}

fn shape_err(id: TheoremId, reason: &str) -> TheoremError {
    TheoremError::Shape {
        id,
        reason: reason.to_string(),
    }
}

fn is_zero(m: &CMatrix<f64>) -> bool {
    m.as_slice().iter().all(|z| z.re == 0.0 && z.im == 0.0)
}

fn same_space(a: &Arc<KernelSpace<f64>>, b: &Arc<KernelSpace<f64>>) -> bool {
    Arc::ptr_eq(a, b) || (a.family() == b.family() && a.points() == b.points())
}

/// `(A, B)` with `A = |X|^{a} + |Y*|^{b}` on `H₂` and `B = |Y|^{c} + |X*|^{d}` on `H₁`.
fn mixed_sums(
    block: &BlockOperator<f64>,
    a: f64,
    b: f64,
    c: f64,
    d: f64,
) -> (CMatrix<f64>, CMatrix<f64>) {
    let (x, y) = (&block.x, &block.y);
    let on_h2 = &abs_power(x, a) + &abs_power(&y.adjoint(), b);
    let on_h1 = &abs_power(y, c) + &abs_power(&x.adjoint(), d);
    (on_h2, on_h1)
}

/// `‖|Y|^t |X*|^{1−t}‖` and `‖|X|^t |Y*|^{1−t}‖` with support-projection zero powers.
fn aluthge_norms(block: &BlockOperator<f64>, t: f64) -> (f64, f64) {
    let (x, y) = (&block.x, &block.y);
    let first = abs_power_on_support(y, t).matmul(&abs_power_on_support(&x.adjoint(), 1.0 - t));
    let second = abs_power_on_support(x, t).matmul(&abs_power_on_support(&y.adjoint(), 1.0 - t));
    (operator_norm(&first), operator_norm(&second))
}

/// Block-operator inequalities at one Berezin convention.
///
/// Off-diagonal ids (`L21b`, `INEQ1`, `T24a`, `T24b`, `C25a`, `C25b`, `R26`,
/// `C27`, `C28`, `T29`, `C210`, `T31`, `C34`, `C35`) require `S = R = 0`;
/// `L21a` requires `X = Y = 0`; `C27` and `C210` require `Y = X` over one
/// space; `C35` requires `n₁ = n₂`. Parameters: `r`, `p` (`f = t^p`,
/// `g = t^{1−p}`), `s` (`h = t^s`, `INEQ1` uses `r = s`), `t`, `alpha`.
///
/// Links that do not involve the block functional carry `convention: None`.
pub fn check_block(
    id: TheoremId,
    block: &BlockOperator<f64>,
    conv: BerConvention,
    params: &Params,
) -> Result<Vec<Certificate>, TheoremError> {
    if id.kind() != CheckKind::Block {
        return Err(TheoremError::WrongKind { id, expected: "block" });
    }
    block.validate()?;
    let off_diagonal = !matches!(id, TheoremId::L21a | TheoremId::T36 | TheoremId::T37);
    if off_diagonal && !(is_zero(&block.s) && is_zero(&block.r)) {
        return Err(shape_err(id, "diagonal blocks must vanish"));
    }
    if id == TheoremId::L21a && !(is_zero(&block.x) && is_zero(&block.y)) {
        return Err(shape_err(id, "off-diagonal blocks must vanish"));
    }
    if matches!(id, TheoremId::C27 | TheoremId::C210)
        && !(block.x == block.y && same_space(&block.space1, &block.space2))
    {
        return Err(shape_err(id, "requires Y = X over a single space"));
    }
    let (n1, n2) = block.dims();
    if id == TheoremId::C35 && n1 != n2 {
        return Err(shape_err(id, "requires square X and Y"));
    }

    let digest = InputDigest::new(id, params)
        .matrix(block.space1.gram())
        .matrix(block.space2.gram())
        .matrix(&block.s)
        .matrix(&block.x)
        .matrix(&block.y)
        .matrix(&block.r)
        .reals(&[conv as u8 as f64])
        .finish();
    let b = CertBuilder { id, params, digest };
    let c = Some(conv);
    let (sp1, sp2) = (&*block.space1, &*block.space2);
    let (x, y) = (&block.x, &block.y);

    match id {
        TheoremId::L21a => {
            let v = block.ber(conv)?;
            let rhs = ber(sp1, &block.s)?.max(ber(sp2, &block.r)?);
            Ok(vec![b.cert(0, c, v.value, rhs, indices(&v))])
        }
        TheoremId::L21b => {
            let v = block.ber(conv)?;
            let rhs = 0.5 * (operator_norm(x) + operator_norm(y));
            Ok(vec![b.cert(0, c, v.value, rhs, indices(&v))])
        }
        TheoremId::Ineq1 => {
            let p = unit_param(id, params, "p")?;
            let s = param(id, params, "s")?;
            super::require(id, s >= 1.0, "s must be at least 1")?;
            let v = block.ber(conv)?;
            let h = |m: &CMatrix<f64>| {
                operator_norm(&(&abs_power(m, 2.0 * p * s) + &abs_power(m, 2.0 * (1.0 - p) * s)))
            };
            let rhs = 0.25 * h(y) + 0.25 * h(x);
            Ok(vec![b.cert(0, c, v.value.powf(s), rhs, indices(&v))])
        }
        TheoremId::T24a | TheoremId::T24b | TheoremId::C25a | TheoremId::C25b => {
            let r = exponent_r(id, params)?;
            let p = unit_param(id, params, "p")?;
            let (f, g) = (2.0 * r * p, 2.0 * r * (1.0 - p));
            let (a, bb) = if matches!(id, TheoremId::T24a | TheoremId::C25a) {
                mixed_sums(block, f, g, f, g)
            } else {
                mixed_sums(block, f, f, g, g)
            };
            let factor = if matches!(id, TheoremId::T24a | TheoremId::T24b) {
                2f64.powf(r - 1.0)
            } else {
                2f64.powf(r - 2.0)
            };
            let v = block.ber(conv)?;
            let rhs = factor * ber(sp2, &a)?.sqrt() * ber(sp1, &bb)?.sqrt();
            Ok(vec![b.cert(0, c, v.value.powf(r), rhs, indices(&v))])
        }
        TheoremId::R26 | TheoremId::C28 => {
            let (a, bb) = mixed_sums(block, 1.0, 1.0, 1.0, 1.0);
            let (ba, bb) = (ber(sp2, &a)?, ber(sp1, &bb)?);
            let v = block.ber(conv)?;
            let geo = 0.5 * ba.sqrt() * bb.sqrt();
            let mut out = vec![b.cert(0, c, v.value, geo, indices(&v))];
            if id == TheoremId::C28 {
                let mean = 0.5 * (0.5 * (ba + bb));
                out.push(b.cert(1, None, geo, mean, vec![]));
                out.push(b.cert(2, None, mean, 0.5 * ba.max(bb), vec![]));
            }
            Ok(out)
        }
        TheoremId::C27 => {
            let sum = &matrix_abs(x) + &matrix_abs(&x.adjoint());
            let half = 0.5 * ber(sp1, &sum)?;
            let v = block.ber(conv)?;
            Ok(vec![
                b.cert(0, c, v.value, half, indices(&v)),
                b.cert(1, None, half, operator_norm(x), vec![]),
            ])
        }
        TheoremId::T29 | TheoremId::C210 => {
            let r = exponent_r(id, params)?;
            let p = unit_param(id, params, "p")?;
            let (f, g) = (2.0 * r * p, 2.0 * r * (1.0 - p));
            let (a, bb) = mixed_sums(block, f, g, f, g);
            let k1 = sp1.normalized_kernels();
            let k2 = sp2.normalized_kernels();
            let a_diag: Vec<f64> = (0..n2)
                .map(|j| quadratic_form(&a, &k2.column(j)).re.max(0.0).sqrt())
                .collect();
            let b_diag: Vec<f64> = (0..n1)
                .map(|j| quadratic_form(&bb, &k1.column(j)).re.max(0.0).sqrt())
                .collect();
            let mut eta = f64::INFINITY;
            for bj in &b_diag {
                for aj in &a_diag {
                    eta = eta.min((aj - bj).powi(2));
                }
            }
            let quarter = 2f64.powf(r - 2.0);
            let head = if id == TheoremId::T29 {
                quarter * (ber(sp2, &a)? + ber(sp1, &bb)?)
            } else {
                2f64.powf(r - 1.0) * operator_norm(&a)
            };
            let v = block.ber(conv)?;
            Ok(vec![b.cert(0, c, v.value.powf(r), head - quarter * eta, indices(&v))])
        }
        TheoremId::T31 | TheoremId::C34 => {
            let t = unit_param(id, params, "t")?;
            let (n_a, n_b) = aluthge_norms(block, t);
            if id == TheoremId::T31 {
                let dense = aluthge_general(&block.assemble()?, t)?;
                let tilde = BlockOperator::from_dense(
                    &dense,
                    Arc::clone(&block.space1),
                    Arc::clone(&block.space2),
                )?;
                let v = tilde.ber(conv)?;
                Ok(vec![b.cert(0, c, v.value, 0.5 * (n_a + n_b), indices(&v))])
            } else {
                let v = block.ber(conv)?;
                let rhs = 0.5 * operator_norm(x).max(operator_norm(y)) + 0.25 * (n_a + n_b);
                Ok(vec![b.cert(0, c, v.value, rhs, indices(&v))])
            }
        }
        TheoremId::C35 => {
            let half = |m: &CMatrix<f64>| abs_power_on_support(m, 0.5);
            let rhs = operator_norm(x).max(operator_norm(y))
                + 0.5
                    * (operator_norm(&half(x).matmul(&half(y)))
                        + operator_norm(&half(&x.adjoint()).matmul(&half(&y.adjoint()))));
            Ok(vec![
                b.cert(0, None, operator_norm(&(x + y)), rhs, vec![]),
                b.cert(1, None, operator_norm(&(x + &y.adjoint())), rhs, vec![]),
            ])
        }
        TheoremId::T36 | TheoremId::T37 => {
            let alpha = unit_param(id, params, "alpha")?;
            let (bs, br) = (ber(sp1, &block.s)?, ber(sp2, &block.r)?);
            let (nx, ny) = (operator_norm(x), operator_norm(y));
            // The second bound mirrors the first under S ↔ R, X ↔ Y.
            let (main, other, first, second) = if id == TheoremId::T36 {
                (bs, br, nx, ny)
            } else {
                (br, bs, ny, nx)
            };
            let rhs = 0.5 * main
                + other
                + 0.5 * (alpha * alpha * main * main + first * first).sqrt()
                + 0.5 * ((1.0 - alpha).powi(2) * main * main + second * second).sqrt();
            let v = block.ber(conv)?;
            Ok(vec![b.cert(0, c, v.value, rhs, indices(&v))])
        }
        _ => unreachable!("kind checked above"),
    }
}

/// Runs a block checker at every convention it is tracked under.
///
/// Convention-free links are kept from the gating convention only, so each
/// such link appears once.
pub fn check_block_all(
    id: TheoremId,
    block: &BlockOperator<f64>,
    params: &Params,
) -> Result<Vec<Certificate>, TheoremError> {
    let convs = id.conventions();
    if convs.is_empty() {
        // C35 never evaluates a block functional.
        return check_block(id, block, BerConvention::Joint, params);
    }
    let mut out = Vec::new();
    for (k, &conv) in convs.iter().enumerate() {
        let certs = check_block(id, block, conv, params)?;
        out.extend(certs.into_iter().filter(|c| k == 0 || c.convention.is_some()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::ensembles::{generate_operator, ginibre_rect, OperatorKind};
    use crate::rkhs::{KernelFamily, SamplePoint};
    use crate::theorems::{params, Mode};

    fn ident(n: usize) -> Arc<KernelSpace<f64>> {
        Arc::new(KernelSpace::identity(n).unwrap())
    }

    fn gaussian(n: usize, shift: f64) -> Arc<KernelSpace<f64>> {
        let pts = (0..n).map(|i| SamplePoint::Line(i as f64 + shift)).collect();
        Arc::new(KernelSpace::build(KernelFamily::Gaussian { width: 0.8 }, pts).unwrap())
    }

    fn unit_offdiag() -> BlockOperator<f64> {
        let one = CMatrix::identity(1);
        let s = ident(1);
        BlockOperator::off_diagonal(one.clone(), one, Arc::clone(&s), s).unwrap()
    }

    #[test]
    fn t24a_equality_witness() {
        let ps = params(&[("r", 1.0), ("p", 0.5)]);
        let c = &check_block(TheoremId::T24a, &unit_offdiag(), BerConvention::Pair, &ps).unwrap()[0];
        assert_eq!(c.lhs, 2.0);
        assert!((c.rhs - 2.0).abs() < 1e-15);
        assert!(c.slack.abs() <= 1e-12);
        assert_eq!(c.mode, Mode::Gating);
    }

    #[test]
    fn l21b_zero_block() {
        let z = CMatrix::zeros(2, 2);
        let blk = BlockOperator::off_diagonal(z.clone(), z, ident(2), ident(2)).unwrap();
        let c = &check_block(TheoremId::L21b, &blk, BerConvention::Joint, &params(&[])).unwrap()[0];
        assert_eq!((c.lhs, c.rhs), (0.0, 0.0));
        assert!(c.holds);
    }

    #[test]
    fn c27_identity_link() {
        let s = ident(2);
        let i2 = CMatrix::identity(2);
        let blk = BlockOperator::off_diagonal(i2.clone(), i2, Arc::clone(&s), s).unwrap();
        let c = check_block(TheoremId::C27, &blk, BerConvention::Joint, &params(&[])).unwrap();
        assert_eq!(c[1].convention, None);
        assert!((c[1].lhs - 1.0).abs() < 1e-12 && (c[1].rhs - 1.0).abs() < 1e-12);
        assert!(c[1].slack.abs() <= 1e-12);
    }

    #[test]
    fn pair_convention_overshoots_unit_bounds() {
        // With X = Y = [1] the component-normalized pair value is 2 while
        // ½(‖X‖ + ‖Y‖) = 1; the unit-vector functional attains the bound.
        let blk = unit_offdiag();
        let pair = &check_block(TheoremId::L21b, &blk, BerConvention::Pair, &params(&[])).unwrap()[0];
        assert!(!pair.holds && pair.mode == Mode::Informational);
        let joint = &check_block(TheoremId::L21b, &blk, BerConvention::Joint, &params(&[])).unwrap()[0];
        assert!(joint.holds && joint.slack == 0.0);
    }

    #[test]
    fn shape_requirements() {
        let one = CMatrix::identity(1);
        let blk = BlockOperator::new(one.clone(), one.clone(), one.clone(), one, ident(1), ident(1)).unwrap();
        let e = check_block(TheoremId::L21b, &blk, BerConvention::Joint, &params(&[]));
        assert!(matches!(e, Err(TheoremError::Shape { .. })));
        let e = check_block(TheoremId::L21a, &blk, BerConvention::Joint, &params(&[]));
        assert!(matches!(e, Err(TheoremError::Shape { .. })));
        let x = ginibre_rect(2, 2, 1);
        let y = ginibre_rect(2, 2, 2);
        let blk = BlockOperator::off_diagonal(x, y, ident(2), ident(2)).unwrap();
        let e = check_block(TheoremId::C27, &blk, BerConvention::Joint, &params(&[]));
        assert!(matches!(e, Err(TheoremError::Shape { .. })));
    }

    #[test]
    fn check_block_all_emits_free_links_once() {
        let s = ident(2);
        let x = generate_operator(OperatorKind::Ginibre, 2, 3);
        let blk = BlockOperator::off_diagonal(x.clone(), x, Arc::clone(&s), s).unwrap();
        let certs = check_block_all(TheoremId::C27, &blk, &params(&[])).unwrap();
        assert_eq!(certs.len(), 3);
        assert_eq!(certs.iter().filter(|c| c.convention.is_none()).count(), 1);
    }

    fn random_offdiag(seed: u64, n1: usize, n2: usize) -> BlockOperator<f64> {
        BlockOperator::off_diagonal(
            ginibre_rect(n1, n2, seed),
            ginibre_rect(n2, n1, seed + 1000),
            gaussian(n1, 0.1),
            gaussian(n2, 0.4),
        )
        .unwrap()
    }

    #[test]
    fn gating_certificates_hold_on_random_blocks() {
        let ids = [
            TheoremId::L21b,
            TheoremId::T24a,
            TheoremId::T24b,
            TheoremId::C25a,
            TheoremId::C25b,
            TheoremId::R26,
            TheoremId::C28,
            TheoremId::T29,
            TheoremId::T31,
        ];
        for seed in 0..15 {
            let blk = random_offdiag(seed, 3, 2);
            for id in ids {
                for r in [1.0, 2.0] {
                    let ps = params(&[("r", r), ("p", 0.25), ("t", 0.75)]);
                    for c in check_block_all(id, &blk, &ps).unwrap() {
                        if c.mode == Mode::Gating {
                            assert!(c.holds, "{c:?}");
                        }
                    }
                }
            }
            let ps = params(&[("p", 0.25), ("s", 2.0)]);
            for c in check_block_all(TheoremId::Ineq1, &blk, &ps).unwrap() {
                assert!(c.mode == Mode::Informational || c.holds, "{c:?}");
            }
        }
    }

    #[test]
    fn t29_dominates_t24a_bound() {
        for seed in 0..20 {
            let blk = random_offdiag(seed, 2, 3);
            let ps = params(&[("r", 1.5), ("p", 0.75)]);
            let t24 = &check_block(TheoremId::T24a, &blk, BerConvention::Pair, &ps).unwrap()[0];
            let t29 = &check_block(TheoremId::T29, &blk, BerConvention::Pair, &ps).unwrap()[0];
            assert!(t29.rhs >= t24.rhs - crate::theorems::tolerance(t24.rhs, 1e-9));
        }
    }

    #[test]
    fn full_block_bounds_hold_at_joint() {
        for seed in 0..15 {
            let (s1, s2) = (gaussian(3, 0.0), gaussian(2, 0.5));
            let blk = BlockOperator::new(
                generate_operator(OperatorKind::Ginibre, 3, seed),
                ginibre_rect(3, 2, seed + 1),
                ginibre_rect(2, 3, seed + 2),
                generate_operator(OperatorKind::Ginibre, 2, seed + 3),
                s1,
                s2,
            )
            .unwrap();
            for id in [TheoremId::T36, TheoremId::T37] {
                for alpha in [0.0, 0.5, 1.0] {
                    for conv in [BerConvention::Joint, BerConvention::DirectSum] {
                        let c = &check_block(id, &blk, conv, &params(&[("alpha", alpha)])).unwrap()[0];
                        assert!(c.holds, "{c:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn scale_covariance_of_power_bounds() {
        for seed in 0..10 {
            let blk = random_offdiag(seed, 2, 2);
            let scaled = BlockOperator::off_diagonal(
                blk.x.scale_real(3.0),
                blk.y.scale_real(3.0),
                Arc::clone(&blk.space1),
                Arc::clone(&blk.space2),
            )
            .unwrap();
            for id in [TheoremId::T24a, TheoremId::T24b, TheoremId::R26] {
                let r = if id == TheoremId::R26 { 1.0 } else { 2.0 };
                let ps = params(&[("r", r), ("p", 0.5)]);
                let a = &check_block(id, &blk, BerConvention::Pair, &ps).unwrap()[0];
                let b = &check_block(id, &scaled, BerConvention::Pair, &ps).unwrap()[0];
                let k = 3f64.powf(r);
                assert!((b.lhs - k * a.lhs).abs() < 1e-9 * (1.0 + b.lhs));
                assert!((b.rhs - k * a.rhs).abs() < 1e-9 * (1.0 + b.rhs));
                assert_eq!(a.slack >= 0.0, b.slack >= 0.0);
            }
        }
    }

    #[test]
    fn c35_reports_both_readings() {
        let blk = random_offdiag(5, 2, 2);
        let c = check_block_all(TheoremId::C35, &blk, &params(&[])).unwrap();
        assert_eq!(c.len(), 2);
        assert!(c.iter().all(|c| c.mode == Mode::Informational && c.convention.is_none()));
        assert_eq!(c[0].rhs, c[1].rhs);
    }
}
