//! Right-censored bivariate sample generation with latent cure indicators.
//!
//! Per subject, margin 1 draws a cure indicator and, if susceptible, an
//! event time through the inverse defective CDF. Margin 2 couples to margin 1
//! twice: its cure status copies margin 1's with a mixing probability driven
//! by the dependence parameter, and its event level passes through the
//! Clayton conditional quantile of margin 1's level. Censoring times are
//! uniform on (0, max finite latent time), recomputed per margin, so every
//! emitted observation is finite; cured subjects always come out censored.
//!
//! Generation is deterministic per seed and parallel-safe: every subject owns
//! two counter-based RNG streams (latent draws, censoring draws), so the
//! result does not depend on evaluation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bdgd::{BdgdParams, BivObs, Dataset};
use crate::error::{Error, Result};

/// Retries for degenerate replicates (a margin with no finite latent time)
/// before giving up.
const RETRY_CAP: u64 = 100;

/// Margin below the invertible boundary `1 - rho` at which a level is
/// treated as "beyond the event mass", i.e. an infinite latent time.
const BOUNDARY_MARGIN: f64 = 1e-12;

/// How margin 2's cure status couples to margin 1 (the "mixing" Bernoulli).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MixingRule {
    /// `p = min(phi / (phi + 1), 1 - 1e-9)`: well-defined for every phi and
    /// increasing in the dependence strength.
    #[default]
    PhiFraction,
    /// `p = phi` taken literally as printed in the source algorithm; only
    /// admissible for `phi <= 1`.
    RawPhi,
}

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub params: BdgdParams,
    pub n: usize,
    pub seed: u64,
    pub mixing: MixingRule,
}

impl GenConfig {
    pub fn new(params: BdgdParams, n: usize, seed: u64) -> Self {
        Self { params, n, seed, mixing: MixingRule::default() }
    }
}

/// One scenario of the twelve-point simulation grid.
#[derive(Debug, Clone, Copy)]
pub struct Scenario {
    pub id: u8,
    pub params: BdgdParams,
}

/// The twelve nominal parameter sets: phi in {1, 3, 10} crossed with four
/// marginal patterns mixing low (rho ~ 0.2865) and high (rho ~ 0.7165)
/// cure rates.
pub fn scenario_catalog() -> Vec<Scenario> {
    let patterns = [
        (1.0, 0.8, 1.0, 0.8),
        (0.5, 1.5, 0.5, 1.5),
        (1.0, 0.8, 0.5, 1.5),
        (0.5, 1.5, 1.0, 0.8),
    ];
    let mut out = Vec::with_capacity(12);
    for (block, phi) in [1.0, 3.0, 10.0].into_iter().enumerate() {
        for (p, &(a1, b1, a2, b2)) in patterns.iter().enumerate() {
            let id = (block * 4 + p + 1) as u8;
            let params = BdgdParams::from_values(a1, b1, a2, b2, phi)
                .expect("catalog values are valid");
            out.push(Scenario { id, params });
        }
    }
    out
}

/// Look up one scenario by its 1-based id.
pub fn scenario(id: u8) -> Result<Scenario> {
    scenario_catalog()
        .into_iter()
        .find(|s| s.id == id)
        .ok_or_else(|| Error::Data(format!("scenario id must be 1..=12, got {id}")))
}

/// Latent bookkeeping for one subject, exposed for test instrumentation.
#[derive(Debug, Clone, Copy)]
pub struct LatentRecord {
    /// Margin-1 susceptibility indicator (false = cured).
    pub susceptible1: bool,
    /// Margin-2's own susceptibility draw, before mixing.
    pub susceptible2: bool,
    /// Whether the mixing draw copied margin 1's cure status.
    pub copied_from_margin1: bool,
    /// Uniform levels on (0, 1 - rho_j).
    pub u1: f64,
    pub u2: f64,
    /// Margin-2 level after the conditional-quantile coupling and the cap.
    pub w: f64,
    /// Latent event times; None encodes infinity (cured or capped level).
    pub latent1: Option<f64>,
    pub latent2: Option<f64>,
    /// Censoring draws.
    pub censor1: f64,
    pub censor2: f64,
}

/// Generate a right-censored dataset.
pub fn generate(config: &GenConfig) -> Result<Dataset> {
    generate_instrumented(config).map(|(d, _)| d)
}

/// [`generate`] plus the per-subject latent records.
pub fn generate_instrumented(config: &GenConfig) -> Result<(Dataset, Vec<LatentRecord>)> {
    if config.n < 2 {
        return Err(Error::Data(format!("sample size must be >= 2, got {}", config.n)));
    }
    if config.n > u32::MAX as usize {
        return Err(Error::Data("sample size exceeds the stream-id space".into()));
    }
    let params = &config.params;
    let phi = params.phi();
    let rho1 = params.rho1();
    let rho2 = params.rho2();
    let p_mix = match config.mixing {
        MixingRule::PhiFraction => (phi.value() / (phi.value() + 1.0)).min(1.0 - 1e-9),
        MixingRule::RawPhi => {
            if phi.value() > 1.0 {
                return Err(Error::Data(format!(
                    "raw mixing probability phi={} is not a probability; use the \
                     phi/(phi+1) rule for phi > 1",
                    phi.value()
                )));
            }
            phi.value()
        }
    };

    for attempt in 0..RETRY_CAP {
        let mut records = Vec::with_capacity(config.n);
        for i in 0..config.n {
            let mut rng = subject_rng(config.seed, attempt, i as u64, 0);
            let susceptible1 = rng.gen::<f64>() < 1.0 - rho1;
            let u1 = open_unit(&mut rng) * (1.0 - rho1);
            let susceptible2 = rng.gen::<f64>() < 1.0 - rho2;
            let u2 = open_unit(&mut rng) * (1.0 - rho2);
            let copied_from_margin1 = rng.gen::<f64>() < p_mix;

            let latent1 = if susceptible1 {
                invertible_level(u1, rho1).map(|u| {
                    params.margin1().inverse_cdf(u).expect("level checked in range")
                })
            } else {
                None
            };

            let w = phi
                .conditional_quantile_given_u(u1, u2)
                .expect("levels lie in the open unit interval")
                .min(1.0 - rho2);
            let susceptible_joint = if copied_from_margin1 {
                susceptible1
            } else {
                susceptible2
            };
            let latent2 = if susceptible_joint {
                invertible_level(w, rho2).map(|w| {
                    params.margin2().inverse_cdf(w).expect("level checked in range")
                })
            } else {
                None
            };

            records.push(LatentRecord {
                susceptible1,
                susceptible2,
                copied_from_margin1,
                u1,
                u2,
                w,
                latent1,
                latent2,
                censor1: 0.0,
                censor2: 0.0,
            });
        }

        let max1 = records.iter().filter_map(|r| r.latent1).fold(f64::NAN, f64::max);
        let max2 = records.iter().filter_map(|r| r.latent2).fold(f64::NAN, f64::max);
        if !max1.is_finite() || !max2.is_finite() {
            log::warn!(
                "generation attempt {attempt}: a margin produced no finite \
                 latent time, regenerating"
            );
            continue;
        }

        let mut observations = Vec::with_capacity(config.n);
        for (i, rec) in records.iter_mut().enumerate() {
            let mut rng = subject_rng(config.seed, attempt, i as u64, 1);
            rec.censor1 = rng.gen::<f64>() * max1;
            rec.censor2 = rng.gen::<f64>() * max2;
            let (t1, d1) = observe(rec.latent1, rec.censor1);
            let (t2, d2) = observe(rec.latent2, rec.censor2);
            observations.push(BivObs::new(t1, d1, t2, d2)?);
        }
        return Ok((Dataset::new(observations)?, records));
    }
    Err(Error::Generation(format!(
        "no usable sample after {RETRY_CAP} attempts (all latent times infinite; \
         cure rates {rho1:.4}/{rho2:.4})"
    )))
}

/// A level is usable by the inverse CDF only strictly below `1 - rho`.
fn invertible_level(u: f64, rho: f64) -> Option<f64> {
    (u < (1.0 - rho) - BOUNDARY_MARGIN && u > 0.0).then_some(u)
}

fn observe(latent: Option<f64>, censor: f64) -> (f64, bool) {
    match latent {
        Some(t) if t < censor => (t, true),
        _ => (censor, false),
    }
}

/// Two dedicated streams per (attempt, subject): phase 0 for latent draws,
/// phase 1 for censoring draws taken after the global maxima are known.
fn subject_rng(seed: u64, attempt: u64, subject: u64, phase: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((attempt << 33) | (subject << 1) | phase);
    rng
}

/// Uniform draw on the open interval (0, 1).
fn open_unit<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let x: f64 = rng.gen();
        if x > 0.0 {
            return x;
        }
    }
}
