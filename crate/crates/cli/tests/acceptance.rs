//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so every line reaches the output.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::Instant;

use berlab::blockops::{aluthge_general, aluthge_offdiag, BerConvention, BlockOperator};
use berlab::harness::ensembles::{generate_operator, OperatorKind};
use berlab::numlin::{
    abs_power, eigenvalues, matrix_abs, operator_norm, polar_decompose, quadratic_form, CMatrix,
};
use berlab::rkhs::{KernelFamily, KernelSpace, SamplePoint};
use berlab::theorems::{check_block, check_scalar, params, TheoremId};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_berlab");

const CAMPAIGN: &[&str] = &[
    "--seed",
    "42",
    "--trials",
    "500",
    "--dims",
    "1x1,2x2,3x2,4x4,6x5",
    "--kernel",
    "identity,szego,gaussian",
];

const GATING: &[&str] = &[
    "L21a", "L21b", "L21c", "INEQ1", "YOUNG2", "I37", "I38", "S310", "T24a", "T24b", "C25a", "C25b", "R26", "C27",
    "C28", "T29", "C210", "T31", "T32", "R33", "C34", "T36", "T37", "P39", "R310", "T311_proof", "T312_proof",
    "L22a", "L22b", "L23", "AX_HOM", "AX_SUB", "AX_NORM",
];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

struct Campaign {
    status: Option<i32>,
    seconds: f64,
    bytes: Vec<u8>,
    report: Value,
}

fn run_campaign(out: &Path) -> Campaign {
    let start = Instant::now();
    let status = Command::new(BIN)
        .arg("verify")
        .args(CAMPAIGN)
        .arg("--out")
        .arg(out)
        .status()
        .expect("run berlab verify");
    let seconds = start.elapsed().as_secs_f64();
    let bytes = std::fs::read(out).unwrap_or_default();
    let report = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    Campaign {
        status: status.code(),
        seconds,
        bytes,
        report,
    }
}

fn rows(report: &Value) -> &[Value] {
    report["results"].as_array().map(Vec::as_slice).unwrap_or(&[])
}

fn criterion_1(c: &Campaign) -> Outcome {
    let rows = rows(&c.report);
    let gating: Vec<&Value> = rows.iter().filter(|r| r["mode"] == "gating").collect();
    let failures: u64 = gating.iter().map(|r| r["failures"].as_u64().unwrap_or(u64::MAX)).sum();
    let missing: Vec<&str> = GATING
        .iter()
        .copied()
        .filter(|id| !gating.iter().any(|r| r["theorem_id"] == *id && r["trials"] == 500))
        .collect();
    let worst = gating
        .iter()
        .map(|r| {
            let w = &r["witness"];
            let slack = w["slack"].as_f64().unwrap_or(f64::NAN);
            let rhs = w["rhs"].as_f64().unwrap_or(f64::NAN);
            slack / (1.0 + rhs.abs())
        })
        .fold(f64::INFINITY, f64::min);
    let pass = c.status == Some(0) && failures == 0 && missing.is_empty() && worst >= -1e-9 && c.seconds <= 300.0;
    outcome(
        pass,
        format!(
            "exit {:?}, {} gating aggregates, {failures} failures, missing {missing:?}, worst slack/(1+|rhs|) {worst:.3e}, {:.1} s",
            c.status,
            gating.len(),
            c.seconds
        ),
    )
}

fn identity_space(n: usize) -> Arc<KernelSpace<f64>> {
    Arc::new(KernelSpace::identity(n).expect("identity space"))
}

fn criterion_2() -> Outcome {
    let one = CMatrix::from_real_rows(&[&[1.0]]);
    let s = identity_space(1);
    let block = BlockOperator::off_diagonal(one.clone(), one, s.clone(), s).unwrap();
    let t24 = check_block(TheoremId::T24a, &block, BerConvention::Pair, &params(&[("r", 1.0), ("p", 0.5)])).unwrap();
    let t24 = &t24[0];
    let t24_ok = (t24.lhs - 2.0).abs() <= 1e-12 && (t24.rhs - 2.0).abs() <= 1e-12 && t24.slack.abs() <= 1e-12;

    let mut young_ok = true;
    for m in [1.0, 2.0, 3.0] {
        for a in [0.0, 0.3, 1.0, 2.5, 17.0] {
            let c = check_scalar(TheoremId::Young2, &params(&[("m", m)]), &[a, a]).unwrap();
            young_ok &= c[0].slack == 0.0;
        }
    }

    let mut c27_worst = 0.0f64;
    for n in 1..=4 {
        let s = identity_space(n);
        let x = CMatrix::identity(n);
        let block = BlockOperator::off_diagonal(x.clone(), x, s.clone(), s).unwrap();
        let certs = check_block(TheoremId::C27, &block, BerConvention::Joint, &params(&[])).unwrap();
        let link = certs.iter().find(|c| c.link == 1).expect("second link");
        c27_worst = c27_worst.max(link.slack.abs());
    }
    let c27_ok = c27_worst <= 1e-12;
    outcome(
        t24_ok && young_ok && c27_ok,
        format!(
            "T24a lhs {} rhs {} slack {:.1e}; YOUNG2 a=b exact zero: {young_ok}; C27 second link at X=I max |slack| {c27_worst:.1e}",
            t24.lhs, t24.rhs, t24.slack
        ),
    )
}

fn criterion_3() -> Outcome {
    let (mut recon, mut defect, mut product) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..1000u64 {
        let kind = OperatorKind::ALL[(i % 7) as usize];
        let dim = 1 + (i / 7 % 8) as usize;
        let t = generate_operator(kind, dim, 0xC3_0000 + i);
        let scale = 1.0 + operator_norm(&t);
        let polar = polar_decompose(&t).unwrap();
        let u = &polar.isometry;
        recon = recon.max(operator_norm(&(&u.matmul(&polar.modulus) - &t)) / scale);
        defect = defect.max(operator_norm(&(&u.matmul(&u.adjoint()).matmul(u) - u)));
        let abs = matrix_abs(&t);
        for p in [0.25, 0.5, 0.75] {
            let fg = abs_power(&t, p).matmul(&abs_power(&t, 1.0 - p));
            product = product.max(operator_norm(&(&fg - &abs)) / scale);
        }
    }
    outcome(
        recon <= 1e-9 && defect <= 1e-9 && product <= 1e-9,
        format!("max polar residual {recon:.2e}, isometry defect {defect:.2e}, f·g product defect {product:.2e}"),
    )
}

fn random_space(rng: &mut ChaCha8Rng, family_index: usize) -> KernelSpace<f64> {
    loop {
        let n = rng.random_range(1..=6);
        let (family, points) = match family_index % 4 {
            0 => (KernelFamily::Identity, (0..n).map(SamplePoint::Index).collect()),
            1 | 2 => {
                let family = if family_index % 4 == 1 {
                    KernelFamily::Szego
                } else {
                    KernelFamily::Bergman
                };
                let pts = (0..n)
                    .map(|_| {
                        let r = 0.9 * rng.random::<f64>().sqrt();
                        SamplePoint::Disk(Complex::from_polar(r, std::f64::consts::TAU * rng.random::<f64>()))
                    })
                    .collect();
                (family, pts)
            }
            _ => {
                let width = rng.random_range(0.5..1.0);
                let pts = (0..n).map(|i| SamplePoint::Line(i as f64 + rng.random_range(-0.25..0.25))).collect();
                (KernelFamily::Gaussian { width }, pts)
            }
        };
        if let Ok(space) = KernelSpace::build(family, points) {
            return space;
        }
    }
}

/// `k(λ, λ) = ‖k_λ‖²` from the kernel formula.
fn kernel_diagonal(family: &KernelFamily<f64>, p: &SamplePoint<f64>) -> f64 {
    match (family, p) {
        (KernelFamily::Szego, SamplePoint::Disk(z)) => 1.0 / (1.0 - z.norm_sqr()),
        (KernelFamily::Bergman, SamplePoint::Disk(z)) => (1.0 - z.norm_sqr()).powi(-2),
        _ => 1.0,
    }
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC4);
    let mut worst = 0.0f64;
    for i in 0..500 {
        let space = random_space(&mut rng, i);
        let a = generate_operator(OperatorKind::ALL[i % 7], space.dim(), rng.random());
        let chart = space.chart();
        let brute = space
            .points()
            .iter()
            .enumerate()
            .map(|(j, p)| quadratic_form(&a, &chart.column(j)).norm() / kernel_diagonal(space.family(), p))
            .fold(0.0f64, f64::max);
        let ber = space.berezin_number(&a).unwrap().value;
        let err = (ber - brute).abs();
        let rel = if err == 0.0 { 0.0 } else { err / brute.abs().max(ber.abs()) };
        worst = worst.max(rel);
    }
    outcome(worst <= 1e-10, format!("max relative gap {worst:.2e} over 500 draws"))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC5);
    let mut worst = 0.0f64;
    for i in 0..200 {
        let space = random_space(&mut rng, i);
        let a = generate_operator(OperatorKind::ALL[i % 7], space.dim(), rng.random());
        let ber = space.berezin_number(&a).unwrap().value;
        let rot = space.ber_via_rotations(&a, 720).unwrap();
        let rel = if ber == 0.0 { rot.abs() } else { (rot - ber).abs() / ber };
        worst = worst.max(rel);
    }
    outcome(worst <= 1e-4, format!("max relative gap {worst:.2e} over 200 draws at 720 angles"))
}

fn nonzero_eigenvalues(m: &CMatrix<f64>, floor: f64) -> Vec<Complex<f64>> {
    let mut ev: Vec<_> = eigenvalues(m).unwrap().into_iter().filter(|z| z.norm() > floor).collect();
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    ev
}

/// Greedy nearest matching; returns the largest relative mismatch.
fn spectrum_gap(a: &[Complex<f64>], b: &[Complex<f64>]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for z in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, w)| (k, (z - w).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))?;
        used[k] = true;
        worst = worst.max(d / z.norm());
    }
    Some(worst)
}

fn criterion_6() -> Outcome {
    let (mut assemble_gap, mut spectrum) = (0.0f64, 0.0f64);
    let mut count_mismatch = 0;
    for i in 0..200u64 {
        let n = 1 + (i % 6) as usize;
        let kind = if i % 2 == 0 {
            OperatorKind::Ginibre
        } else {
            OperatorKind::Contraction
        };
        let x = generate_operator(kind, n, 0xC6_0000 + 2 * i);
        let y = generate_operator(kind, n, 0xC6_0001 + 2 * i);
        let s = identity_space(n);
        let block = BlockOperator::off_diagonal(x, y, s.clone(), s).unwrap();
        let dense = block.assemble().unwrap();
        let floor = 1e-9 * operator_norm(&dense);
        let spec_t = nonzero_eigenvalues(&dense, floor);
        for t in [0.25, 0.5, 0.75] {
            let structured = aluthge_offdiag(&block, t).unwrap().assemble().unwrap();
            let general = aluthge_general(&dense, t).unwrap();
            assemble_gap = assemble_gap.max(structured.max_abs_diff(&general));
            match spectrum_gap(&spec_t, &nonzero_eigenvalues(&general, floor)) {
                Some(g) => spectrum = spectrum.max(g),
                None => count_mismatch += 1,
            }
        }
    }
    outcome(
        assemble_gap <= 1e-8 && spectrum <= 1e-7 && count_mismatch == 0,
        format!(
            "max entry gap {assemble_gap:.2e}, max relative eigenvalue gap {spectrum:.2e}, {count_mismatch} multiplicity mismatches"
        ),
    )
}

fn case_matches(row: &Value) -> bool {
    let conv = row["convention"].as_str().unwrap_or("none");
    let out = Command::new(BIN)
        .arg("case")
        .args(&CAMPAIGN[4..])
        .args(["--theorem", row["theorem_id"].as_str().unwrap_or("")])
        .args(["--seed", &row["min_slack_seed"].to_string()])
        .args(["--link", &row["link"].to_string()])
        .args(["--convention", conv])
        .output()
        .expect("run berlab case");
    serde_json::from_slice::<Value>(&out.stdout).is_ok_and(|cert| cert == row["witness"])
}

fn criterion_7(a: &Campaign, b: &Campaign) -> Outcome {
    let identical = !a.bytes.is_empty() && a.bytes == b.bytes;
    let rows = rows(&a.report);
    let mismatched: Vec<String> = rows
        .iter()
        .filter(|r| !case_matches(r))
        .map(|r| format!("{}#{}", r["theorem_id"], r["link"]))
        .collect();
    outcome(
        identical && mismatched.is_empty() && !rows.is_empty(),
        format!(
            "reports byte-identical: {identical} ({} bytes); {} of {} witnesses reproduced by `case`",
            a.bytes.len(),
            rows.len() - mismatched.len(),
            rows.len()
        ),
    )
}

fn criterion_8(c: &Campaign) -> Outcome {
    let rows = rows(&c.report);
    let mut details = Vec::new();
    let mut ok = c.status == Some(0);
    for (id, link) in [("T311_stmt", 0), ("T312_stmt", 0), ("C35", 0), ("C35", 1)] {
        match rows.iter().find(|r| r["theorem_id"] == id && r["link"] == link) {
            Some(r) => {
                let slack = r["min_slack"].as_f64();
                ok &= r["mode"] == "informational" && r["failures"] == 0 && slack.is_some();
                details.push(format!("{id}#{link} min_slack {:.3e}", slack.unwrap_or(f64::NAN)));
            }
            None => {
                ok = false;
                details.push(format!("{id}#{link} missing"));
            }
        }
    }
    outcome(ok, format!("{}; exit {:?}", details.join(", "), c.status))
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temp dir");
    let first = run_campaign(&dir.path().join("first.json"));
    let second = run_campaign(&dir.path().join("second.json"));

    let results = [
        ("gating-checker soundness", criterion_1(&first)),
        ("equality witnesses", criterion_2()),
        ("decomposition oracles", criterion_3()),
        ("Berezin oracle equivalence", criterion_4()),
        ("rotation identity", criterion_5()),
        ("Aluthge consistency", criterion_6()),
        ("determinism", criterion_7(&first, &second)),
        ("informational tracking", criterion_8(&first)),
    ];
    let mut failed = 0;
    for (i, (name, o)) in results.iter().enumerate() {
        println!("criterion {} {name}: {} ({})", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} of {} criteria pass", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
