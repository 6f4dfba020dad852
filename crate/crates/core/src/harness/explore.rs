//! Adversarial slack minimization around the worst random witness.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::blockops::BerConvention;
use crate::theorems::{Certificate, Mode, TheoremId};

use super::campaign::run_campaign;
use super::config::CampaignConfig;
use super::instance::{draw_instance, Instance};
use super::HarnessError;

pub const RESTARTS: usize = 10;

const STEP_FRACTION: f64 = 0.1;
const STREAM: u64 = 0x6578_706c_6f72_6521;

fn target(inst: &Instance, link: usize, conv: Option<BerConvention>, tol: f64) -> Option<Certificate> {
    inst.evaluate()
        .ok()?
        .into_iter()
        .find(|c| c.link == link && c.convention == conv)
        .map(|c| c.with_tol(tol))
        .filter(|c| c.slack.is_finite())
}

fn initial_step(inst: &Instance) -> f64 {
    let mut sum = inst.scalars.iter().map(|x| x * x).sum::<f64>();
    for m in &inst.ops {
        sum += m.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>();
    }
    let rms = (sum / inst.coordinates().max(1) as f64).sqrt();
    STEP_FRACTION * rms.max(1e-2)
}

/// Searches for a smaller-slack certificate of `id`.
///
/// Starts from the least-slack gating witness of a campaign restricted to
/// `id` (least-slack overall for informational checkers) and spends `budget`
/// rounds of Gaussian perturbation of every input coordinate, split over
/// [`RESTARTS`] restarts. A round that does not improve halves the step; each
/// restart resumes from the best point with the initial step. Parameters and
/// kernel spaces stay fixed. The result never has larger slack than the start.
pub fn explore(config: &CampaignConfig, id: TheoremId, budget: usize) -> Result<Certificate, HarnessError> {
    let mut cfg = config.clone();
    cfg.checker_filter = vec![id];
    let report = run_campaign(&cfg)?;
    let any_gating = report.results.iter().any(|a| a.mode == Mode::Gating);
    let start = report
        .results
        .iter()
        .filter(|a| !any_gating || a.mode == Mode::Gating)
        .reduce(|a, b| if b.min_slack < a.min_slack { b } else { a })
        .ok_or(HarnessError::NoCertificate(id))?;
    let start_cert = start.witness.clone();
    if budget == 0 {
        return Ok(start_cert);
    }

    let (link, conv, seed) = (start.link, start.convention, start.min_slack_seed);
    let inst = draw_instance(&cfg, id, seed).map_err(|e| HarnessError::Evaluation(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ STREAM);
    let step0 = initial_step(&inst);
    let coords = inst.coordinates();
    let mut best = (inst, start_cert);

    for restart in 0..RESTARTS {
        let rounds = budget / RESTARTS + usize::from(restart < budget % RESTARTS);
        let mut current = best.clone();
        let mut step = step0;
        for _ in 0..rounds {
            let mut candidate = current.0.clone();
            for k in 0..coords {
                let z: f64 = StandardNormal.sample(&mut rng);
                candidate.perturb(k, step * z);
            }
            match target(&candidate, link, conv, cfg.check_tol) {
                Some(cert) if cert.slack < current.1.slack => {
                    current = (candidate, cert);
                    if current.1.slack < best.1.slack {
                        best = current.clone();
                    }
                }
                _ => step *= 0.5,
            }
        }
    }
    Ok(best.1)
}
