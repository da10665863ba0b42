//! Monte-Carlo simulation study: repeated generate/fit cycles per scenario
//! and sample size, summarizing bias, MSE and Wald-interval coverage per
//! tracked quantity.
//!
//! Replicates flagged as monotone likelihoods are excluded from the
//! summaries and counted separately; the summaries condition on successful
//! fits. Replicate seeds are hashed from (study seed, scenario, n, index),
//! and cells parallelize over replicates with order-stable aggregation, so a
//! study is reproducible under any scheduling.

use rayon::prelude::*;
use serde::Serialize;

use crate::bdgd::{BdgdParams, Dataset};
use crate::error::{Error, Result};
use crate::mle::{fit, FitConfig, FitReport};
use crate::simulate::{generate, scenario, GenConfig};
use crate::stats::{mean, standard_normal_quantile, Interval};

/// The quantities tracked per cell: the five raw parameters plus the derived
/// cure rates and Kendall tau (whose intervals come from the delta method).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrackedParam {
    Alpha1,
    Beta1,
    Alpha2,
    Beta2,
    Phi,
    Rho1,
    Rho2,
    TauK,
}

impl TrackedParam {
    pub const ALL: [TrackedParam; 8] = [
        TrackedParam::Alpha1,
        TrackedParam::Beta1,
        TrackedParam::Alpha2,
        TrackedParam::Beta2,
        TrackedParam::Phi,
        TrackedParam::Rho1,
        TrackedParam::Rho2,
        TrackedParam::TauK,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TrackedParam::Alpha1 => "alpha1",
            TrackedParam::Beta1 => "beta1",
            TrackedParam::Alpha2 => "alpha2",
            TrackedParam::Beta2 => "beta2",
            TrackedParam::Phi => "phi",
            TrackedParam::Rho1 => "rho1",
            TrackedParam::Rho2 => "rho2",
            TrackedParam::TauK => "tau_k",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Data(format!("unknown tracked parameter '{s}'")))
    }

    pub fn nominal(&self, params: &BdgdParams) -> f64 {
        let v = params.values();
        match self {
            TrackedParam::Alpha1 => v[0],
            TrackedParam::Beta1 => v[1],
            TrackedParam::Alpha2 => v[2],
            TrackedParam::Beta2 => v[3],
            TrackedParam::Phi => v[4],
            TrackedParam::Rho1 => params.rho1(),
            TrackedParam::Rho2 => params.rho2(),
            TrackedParam::TauK => params.phi().kendall_tau(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct StudyConfig {
    /// Scenario ids, each in 1..=12.
    pub scenarios: Vec<u8>,
    pub sample_sizes: Vec<usize>,
    /// Replicates per (scenario, n) cell; desk default 200.
    pub replicates: usize,
    pub seed: u64,
    pub nominal_coverage: f64,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            scenarios: vec![1],
            sample_sizes: vec![100, 200, 400],
            replicates: 200,
            seed: 0,
            nominal_coverage: 0.95,
        }
    }
}

impl StudyConfig {
    fn validate(&self) -> Result<()> {
        if self.scenarios.is_empty() || self.sample_sizes.is_empty() {
            return Err(Error::Data("study needs scenarios and sample sizes".into()));
        }
        for id in &self.scenarios {
            scenario(*id)?;
        }
        if self.replicates < 2 {
            return Err(Error::Data(format!(
                "replicates must be >= 2, got {}",
                self.replicates
            )));
        }
        if self.sample_sizes.iter().any(|n| *n < 2) {
            return Err(Error::Data("sample sizes must be >= 2".into()));
        }
        if !(self.nominal_coverage > 0.0 && self.nominal_coverage < 1.0) {
            return Err(Error::Data("nominal coverage must lie in (0,1)".into()));
        }
        Ok(())
    }
}

/// Summary for one tracked quantity in one cell, with the per-replicate
/// estimates kept for box-plot export.
#[derive(Debug, Clone, Serialize)]
pub struct ParamCell {
    pub param: TrackedParam,
    pub nominal: f64,
    pub bias: f64,
    pub mse: f64,
    pub coverage: f64,
    pub estimates: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CellResult {
    pub scenario: u8,
    pub n: usize,
    pub per_param: Vec<ParamCell>,
    pub n_usable: usize,
    pub n_monotone: usize,
    pub n_failed: usize,
    /// Mean over usable replicates of the dependence measures implied by
    /// each fitted phi.
    pub mean_tau_k: f64,
    pub mean_tau_s: f64,
    /// False when every replicate in the cell failed.
    pub usable: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct StudyResult {
    pub replicates: usize,
    pub nominal_coverage: f64,
    pub seed: u64,
    pub cells: Vec<CellResult>,
}

/// Outcome of one replicate, as consumed by the aggregation fold.
enum RepOutcome {
    Usable {
        estimates: [f64; 8],
        covered: [bool; 8],
        tau_k: f64,
        tau_s: f64,
    },
    Monotone,
    Failed,
}

/// Run the study with the real generate-and-fit pipeline.
pub fn run_study(config: &StudyConfig) -> Result<StudyResult> {
    run_study_with(config, |data, nominal, level| {
        let fit_config = FitConfig {
            initial: Some(*nominal),
            confidence_level: level,
            ..FitConfig::default()
        };
        match fit(data, &fit_config) {
            Ok(report) if report.monotone_likelihood => RepOutcome::Monotone,
            Ok(report) => classify(&report, nominal),
            Err(_) => RepOutcome::Failed,
        }
    })
}

fn classify(report: &FitReport, nominal: &BdgdParams) -> RepOutcome {
    let (Some(wald), Some(rho1), Some(rho2), Some(tau_k), Some(tau_s)) = (
        report.wald_intervals.as_ref(),
        report.rho1,
        report.rho2,
        report.tau_k,
        report.tau_s,
    ) else {
        return RepOutcome::Monotone;
    };
    let values = report.estimates.values();
    let estimates = [
        values[0],
        values[1],
        values[2],
        values[3],
        values[4],
        rho1.estimate,
        rho2.estimate,
        tau_k.estimate,
    ];
    let intervals = [
        wald[0], wald[1], wald[2], wald[3], wald[4], rho1.ci, rho2.ci, tau_k.ci,
    ];
    let mut covered = [false; 8];
    for (i, p) in TrackedParam::ALL.iter().enumerate() {
        covered[i] = intervals[i].contains(p.nominal(nominal));
    }
    RepOutcome::Usable {
        estimates,
        covered,
        tau_k: tau_k.estimate,
        tau_s,
    }
}

/// The study skeleton with an injectable fitter, so the accounting can be
/// exercised against a stub oracle.
fn run_study_with<F>(config: &StudyConfig, fitter: F) -> Result<StudyResult>
where
    F: Fn(&Dataset, &BdgdParams, f64) -> RepOutcome + Sync,
{
    config.validate()?;
    let mut cells = Vec::new();
    for &scenario_id in &config.scenarios {
        let nominal = scenario(scenario_id)?.params;
        for &n in &config.sample_sizes {
            let outcomes: Vec<RepOutcome> = (0..config.replicates)
                .into_par_iter()
                .map(|rep| {
                    let seed = replicate_seed(config.seed, scenario_id, n, rep);
                    match generate(&GenConfig::new(nominal, n, seed)) {
                        Ok(data) => fitter(&data, &nominal, config.nominal_coverage),
                        Err(_) => RepOutcome::Failed,
                    }
                })
                .collect();
            cells.push(aggregate(scenario_id, n, &nominal, &outcomes));
        }
    }
    Ok(StudyResult {
        replicates: config.replicates,
        nominal_coverage: config.nominal_coverage,
        seed: config.seed,
        cells,
    })
}

fn aggregate(
    scenario_id: u8,
    n: usize,
    nominal: &BdgdParams,
    outcomes: &[RepOutcome],
) -> CellResult {
    let mut estimates: [Vec<f64>; 8] = Default::default();
    let mut covered = [0usize; 8];
    let mut tau_k_values = Vec::new();
    let mut tau_s_values = Vec::new();
    let mut n_monotone = 0;
    let mut n_failed = 0;
    for outcome in outcomes {
        match outcome {
            RepOutcome::Usable { estimates: est, covered: cov, tau_k, tau_s } => {
                for i in 0..8 {
                    estimates[i].push(est[i]);
                    covered[i] += cov[i] as usize;
                }
                tau_k_values.push(*tau_k);
                tau_s_values.push(*tau_s);
            }
            RepOutcome::Monotone => n_monotone += 1,
            RepOutcome::Failed => n_failed += 1,
        }
    }
    let n_usable = estimates[0].len();
    let per_param = TrackedParam::ALL
        .iter()
        .enumerate()
        .map(|(i, param)| {
            let nominal_value = param.nominal(nominal);
            let (bias, mse, coverage) = if n_usable == 0 {
                (f64::NAN, f64::NAN, f64::NAN)
            } else {
                let deviations: Vec<f64> =
                    estimates[i].iter().map(|e| e - nominal_value).collect();
                (
                    mean(&deviations),
                    mean(&deviations.iter().map(|d| d * d).collect::<Vec<_>>()),
                    covered[i] as f64 / n_usable as f64,
                )
            };
            ParamCell {
                param: *param,
                nominal: nominal_value,
                bias,
                mse,
                coverage,
                estimates: estimates[i].clone(),
            }
        })
        .collect();
    CellResult {
        scenario: scenario_id,
        n,
        per_param,
        n_usable,
        n_monotone,
        n_failed,
        mean_tau_k: if tau_k_values.is_empty() { f64::NAN } else { mean(&tau_k_values) },
        mean_tau_s: if tau_s_values.is_empty() { f64::NAN } else { mean(&tau_s_values) },
        usable: n_usable > 0,
    }
}

/// Two-sided binomial acceptance band for an observed coverage proportion:
/// `p +- z_{0.975} sqrt(p (1-p) / N)`, normal approximation at the 5 percent
/// significance level.
pub fn coverage_band(replicates: usize, nominal: f64) -> Interval {
    assert!(replicates >= 2, "need at least 2 replicates");
    assert!(nominal > 0.0 && nominal < 1.0, "nominal coverage must lie in (0,1)");
    let z = standard_normal_quantile(0.975);
    let half = z * (nominal * (1.0 - nominal) / replicates as f64).sqrt();
    Interval::new(nominal - half, nominal + half)
}

/// One row of the long-format box-plot export.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoxplotRow {
    pub n: usize,
    pub estimate: f64,
    pub nominal: f64,
}

/// Long-format per-replicate estimates for one (parameter, scenario) pair,
/// ready for external plotting.
pub fn export_boxplot_series(
    result: &StudyResult,
    param: TrackedParam,
    scenario_id: u8,
) -> Result<Vec<BoxplotRow>> {
    let mut rows = Vec::new();
    for cell in result.cells.iter().filter(|c| c.scenario == scenario_id) {
        let pc = cell
            .per_param
            .iter()
            .find(|p| p.param == param)
            .expect("every cell tracks all parameters");
        for est in &pc.estimates {
            rows.push(BoxplotRow { n: cell.n, estimate: *est, nominal: pc.nominal });
        }
    }
    if rows.is_empty() {
        return Err(Error::Data(format!(
            "no populated cells for scenario {scenario_id}"
        )));
    }
    Ok(rows)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Independent stream per (study seed, scenario, n, replicate).
fn replicate_seed(seed: u64, scenario_id: u8, n: usize, replicate: usize) -> u64 {
    let mut s = splitmix64(seed ^ 0xD6E8FEB86659FD93);
    s = splitmix64(s ^ scenario_id as u64);
    s = splitmix64(s ^ n as u64);
    splitmix64(s ^ replicate as u64)
}
