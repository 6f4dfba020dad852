use num_complex::Complex;

use crate::numlin::{inner, vec_norm};
use crate::scalar::pow0;

use super::{
    exponent_r, param, require, unit_param, CertBuilder, Certificate, CheckKind, InputDigest,
    Params, TheoremError, TheoremId,
};

/// Scalar inequalities.
///
/// * `YOUNG2` (`m`; inputs `a, b ≥ 0`):
///   `(√(ab))^m + 2^{-m}(a^{m/2} − b^{m/2})² ≤ 2^{-m}(a + b)^m`.
/// * `I37` (`nu`, `r`; inputs `a, b`): `a^ν b^{1−ν} ≤ νa + (1−ν)b ≤ (νa^r + (1−ν)b^r)^{1/r}`.
/// * `I38` (`young_p`, `r`; inputs `a, b`): `ab ≤ a^p/p + b^q/q ≤ (a^{pr}/p + b^{qr}/q)^{1/r}`.
/// * `S310` (inputs: three complex vectors `a, b, e` of equal length, packed as
///   interleaved re/im; `e` is normalized before use):
///   `|⟨a,b⟩| ≤ |⟨a,b⟩ − ⟨a,e⟩⟨e,b⟩| + |⟨a,e⟩⟨e,b⟩| ≤ ‖a‖‖b‖`, plus the
///   consequence `|⟨a,e⟩⟨e,b⟩| ≤ ½(‖a‖‖b‖ + |⟨a,b⟩|)` as a third link.
pub fn check_scalar(
    id: TheoremId,
    params: &Params,
    inputs: &[f64],
) -> Result<Vec<Certificate>, TheoremError> {
    if id.kind() != CheckKind::Scalar {
        return Err(TheoremError::WrongKind { id, expected: "scalar" });
    }
    let b = CertBuilder {
        id,
        params,
        digest: InputDigest::new(id, params).reals(inputs).finish(),
    };
    match id {
        TheoremId::Young2 => {
            let (x, y) = pair(id, inputs)?;
            let m = param(id, params, "m")?;
            require(id, m >= 1.0 && m.fract() == 0.0, "m must be a positive integer")?;
            let m = m as i32;
            let half = 0.5f64.powi(m);
            let gap = x.powf(m as f64 / 2.0) - y.powf(m as f64 / 2.0);
            let lhs = (x * y).sqrt().powi(m) + half * gap * gap;
            let rhs = half * (x + y).powi(m);
            Ok(vec![b.cert(0, None, lhs, rhs, vec![])])
        }
        TheoremId::I37 => {
            let (x, y) = pair(id, inputs)?;
            let nu = unit_param(id, params, "nu")?;
            let r = exponent_r(id, params)?;
            let geo = pow0(x, nu) * pow0(y, 1.0 - nu);
            let arith = nu * x + (1.0 - nu) * y;
            let power = (nu * x.powf(r) + (1.0 - nu) * y.powf(r)).powf(1.0 / r);
            Ok(vec![
                b.cert(0, None, geo, arith, vec![]),
                b.cert(1, None, arith, power, vec![]),
            ])
        }
        TheoremId::I38 => {
            let (x, y) = pair(id, inputs)?;
            let p = param(id, params, "young_p")?;
            require(id, p > 1.0, "young_p must exceed 1")?;
            let q = p / (p - 1.0);
            let r = exponent_r(id, params)?;
            let young = x.powf(p) / p + y.powf(q) / q;
            let power = (x.powf(p * r) / p + y.powf(q * r) / q).powf(1.0 / r);
            Ok(vec![
                b.cert(0, None, x * y, young, vec![]),
                b.cert(1, None, young, power, vec![]),
            ])
        }
        TheoremId::S310 => {
            require(
                id,
                !inputs.is_empty() && inputs.len().is_multiple_of(6),
                "inputs must be three equal-length complex vectors",
            )?;
            let n = inputs.len() / 6;
            let unpack = |k: usize| -> Vec<Complex<f64>> {
                (0..n)
                    .map(|i| Complex::new(inputs[2 * (k * n + i)], inputs[2 * (k * n + i) + 1]))
                    .collect()
            };
            let (a, bv, e) = (unpack(0), unpack(1), unpack(2));
            let en = vec_norm(&e);
            require(id, en > 0.0, "e must be nonzero")?;
            let e: Vec<_> = e.iter().map(|z| z / en).collect();
            let ab = inner(&a, &bv);
            let proj = inner(&a, &e) * inner(&e, &bv);
            let middle = (ab - proj).norm() + proj.norm();
            let norms = vec_norm(&a) * vec_norm(&bv);
            Ok(vec![
                b.cert(0, None, ab.norm(), middle, vec![]),
                b.cert(1, None, middle, norms, vec![]),
                b.cert(2, None, proj.norm(), 0.5 * (norms + ab.norm()), vec![]),
            ])
        }
        _ => unreachable!("kind checked above"),
    }
}

fn pair(id: TheoremId, inputs: &[f64]) -> Result<(f64, f64), TheoremError> {
    match inputs {
        &[a, b] if a >= 0.0 && b >= 0.0 && a.is_finite() && b.is_finite() => Ok((a, b)),
        _ => Err(TheoremError::BadParams {
            id,
            reason: "expected two finite nonnegative inputs".into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theorems::params;
    use proptest::prelude::*;

    #[test]
    fn young2_equality_at_a_eq_b() {
        for m in 1..=3 {
            for a in [0.0, 1.0, 0.37, 12.5] {
                let c = check_scalar(TheoremId::Young2, &params(&[("m", m as f64)]), &[a, a]).unwrap();
                assert_eq!(c[0].slack, 0.0, "m = {m}, a = {a}");
            }
        }
    }

    #[test]
    fn young2_hand_value() {
        let c = check_scalar(TheoremId::Young2, &params(&[("m", 2.0)]), &[4.0, 0.0]).unwrap();
        assert_eq!((c[0].lhs, c[0].rhs, c[0].slack), (4.0, 4.0, 0.0));
        let c = check_scalar(TheoremId::Young2, &params(&[("m", 1.0)]), &[1.0, 1.0]).unwrap();
        assert_eq!((c[0].lhs, c[0].rhs), (1.0, 1.0));
    }

    #[test]
    fn i37_degenerate_equality() {
        let c = check_scalar(TheoremId::I37, &params(&[("nu", 0.3), ("r", 2.0)]), &[2.5, 2.5]).unwrap();
        assert_eq!(c.len(), 2);
        for cert in c {
            assert!(cert.slack.abs() < 1e-15, "{cert:?}");
        }
    }

    #[test]
    fn bad_params_are_rejected() {
        let e = check_scalar(TheoremId::Young2, &params(&[("m", 1.5)]), &[1.0, 2.0]);
        assert!(matches!(e, Err(TheoremError::BadParams { .. })));
        let e = check_scalar(TheoremId::I38, &params(&[("young_p", 1.0), ("r", 1.0)]), &[1.0, 2.0]);
        assert!(matches!(e, Err(TheoremError::BadParams { .. })));
        let e = check_scalar(TheoremId::I37, &params(&[("nu", 0.5), ("r", 1.0)]), &[-1.0, 2.0]);
        assert!(matches!(e, Err(TheoremError::BadParams { .. })));
        let e = check_scalar(TheoremId::P39, &params(&[]), &[]);
        assert!(matches!(e, Err(TheoremError::WrongKind { .. })));
    }

    proptest! {
        #[test]
        fn scalar_chains_hold(
            a in 0.0f64..10.0,
            b in 0.0f64..10.0,
            nu in 0.0f64..=1.0,
            r in 1.0f64..4.0,
            p in 1.1f64..5.0,
            m in 1u32..4,
        ) {
            let checks = [
                check_scalar(TheoremId::Young2, &params(&[("m", m as f64)]), &[a, b]).unwrap(),
                check_scalar(TheoremId::I37, &params(&[("nu", nu), ("r", r)]), &[a, b]).unwrap(),
                check_scalar(TheoremId::I38, &params(&[("young_p", p), ("r", r)]), &[a, b]).unwrap(),
            ];
            for c in checks.iter().flatten() {
                prop_assert!(c.holds, "{:?}", c);
            }
        }

        #[test]
        fn schwarz_refinement_holds(v in proptest::collection::vec(-3.0f64..3.0, 18)) {
            prop_assume!(v[12..].iter().any(|x| x.abs() > 1e-3));
            for c in check_scalar(TheoremId::S310, &params(&[]), &v).unwrap() {
                prop_assert!(c.holds, "{:?}", c);
            }
        }
    }
}
