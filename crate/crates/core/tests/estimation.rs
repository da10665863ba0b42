//! End-to-end maximum-likelihood behavior on generated samples.

use defectiva::mle::{self, FitConfig, NelderMeadConfig};
use defectiva::simulate::{generate, scenario, GenConfig};
use defectiva::{fit, BdgdParams, BivObs, Dataset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn scenario1_data(n: usize, seed: u64) -> Dataset {
    generate(&GenConfig::new(scenario(1).unwrap().params, n, seed)).unwrap()
}

fn truth_config() -> FitConfig {
    FitConfig {
        initial: Some(scenario(1).unwrap().params),
        ..FitConfig::default()
    }
}

/// Brute-force sampler that follows the model exactly: copula levels by
/// conditional-quantile inversion, defective margins through survival
/// levels, then independent uniform censoring. Unlike the study generator
/// (which reproduces the published algorithm together with its documented
/// distortions on margin 2), data from this oracle obeys the likelihood, so
/// the fitted estimates must recover the truth at textbook rates.
fn exact_model_sample(params: &BdgdParams, n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (rho1, rho2) = (params.rho1(), params.rho2());
    let mut latent = Vec::with_capacity(n);
    for _ in 0..n {
        let u: f64 = rng.gen_range(1e-12..1.0);
        let p: f64 = rng.gen_range(1e-12..1.0);
        let v = params.phi().conditional_quantile_given_u(u, p).unwrap();
        let t1 = (u > rho1 + 1e-9)
            .then(|| params.margin1().inverse_cdf(1.0 - u).unwrap());
        let t2 = (v > rho2 + 1e-9)
            .then(|| params.margin2().inverse_cdf(1.0 - v).unwrap());
        latent.push((t1, t2));
    }
    let max1 = latent.iter().filter_map(|l| l.0).fold(0.0, f64::max);
    let max2 = latent.iter().filter_map(|l| l.1).fold(0.0, f64::max);
    let obs = latent
        .iter()
        .map(|(t1, t2)| {
            let c1 = rng.gen::<f64>() * max1;
            let c2 = rng.gen::<f64>() * max2;
            let (x1, d1) = match t1 {
                Some(t) if *t < c1 => (*t, true),
                _ => (c1, false),
            };
            let (x2, d2) = match t2 {
                Some(t) if *t < c2 => (*t, true),
                _ => (c2, false),
            };
            BivObs::new(x1, d1, x2, d2).unwrap()
        })
        .collect();
    Dataset::new(obs).unwrap()
}

#[test]
fn recovers_exact_model_data_within_three_standard_errors() {
    let truth = scenario(1).unwrap().params;
    let data = exact_model_sample(&truth, 1000, 424242);
    let report = fit(&data, &truth_config()).unwrap();
    assert!(report.converged);
    assert!(!report.monotone_likelihood);
    let nominal = truth.values();
    let estimates = report.estimates.values();
    let se = report.std_errors.unwrap();
    for i in 0..5 {
        let dev = (estimates[i] - nominal[i]).abs();
        assert!(
            dev <= 3.0 * se[i],
            "parameter {i}: estimate {} vs truth {} exceeds 3 se ({})",
            estimates[i],
            nominal[i],
            se[i]
        );
    }
}

#[test]
fn study_generator_recovery_is_faithful_where_exact() {
    // The study generator reproduces margin 1 and the cure fractions
    // faithfully; its margin-2 shape parameters carry a known distortion,
    // so those are only pinned loosely here.
    let data = scenario1_data(1000, 424242);
    let report = fit(&data, &truth_config()).unwrap();
    assert!(report.converged);
    let truth = scenario(1).unwrap().params;
    let estimates = report.estimates.values();
    let se = report.std_errors.unwrap();
    for i in [0, 1] {
        let dev = (estimates[i] - truth.values()[i]).abs();
        assert!(dev <= 3.0 * se[i], "margin-1 parameter {i} off by {dev}");
    }
    let rho1 = report.rho1.unwrap();
    assert!((rho1.estimate - truth.rho1()).abs() <= 3.0 * rho1.std_error);
    let rho2 = report.rho2.unwrap();
    assert!((rho2.estimate - truth.rho2()).abs() <= 0.1);
    let phi_hat = estimates[4];
    assert!((0.5..3.0).contains(&phi_hat), "phi_hat {phi_hat}");
}

#[test]
fn all_censored_sample_is_monotone() {
    let obs: Vec<BivObs> = (1..=40)
        .map(|i| BivObs::new(i as f64 * 0.1, false, i as f64 * 0.07, false).unwrap())
        .collect();
    let data = Dataset::new(obs).unwrap();
    let report = fit(&data, &truth_config()).unwrap();
    assert!(report.monotone_likelihood);
    assert!(!report.converged);
    assert!(report.std_errors.is_none());
    assert!(report.wald_intervals.is_none());
    assert!(report.rho1.is_none());
}

#[test]
fn independence_data_fits_near_zero_dependence() {
    let params = BdgdParams::from_values(1.0, 0.8, 1.0, 0.8, 1e-3).unwrap();
    let data = generate(&GenConfig::new(params, 500, 99)).unwrap();
    // Fit freely, warm start derived from the data itself.
    let report = fit(&data, &FitConfig::default()).unwrap();
    let phi_hat = report.estimates.values()[4];
    let tau_hat = report.estimates.phi().kendall_tau();
    assert!(phi_hat < 0.25, "phi_hat {phi_hat}");
    assert!(tau_hat < 0.1, "tau_hat {tau_hat}");
}

#[test]
fn fit_is_deterministic() {
    let data = scenario1_data(300, 7);
    let a = fit(&data, &truth_config()).unwrap();
    let b = fit(&data, &truth_config()).unwrap();
    assert_eq!(a.estimates.values(), b.estimates.values());
    assert_eq!(a.std_errors, b.std_errors);
    assert_eq!(a.loglik_at_max, b.loglik_at_max);
    assert_eq!(a.iterations, b.iterations);
}

#[test]
fn optimum_beats_single_parameter_perturbations() {
    let data = scenario1_data(600, 13);
    let report = fit(&data, &truth_config()).unwrap();
    assert!(report.converged);
    let best = report.estimates.values();
    let ll_best = report.loglik_at_max;
    for i in 0..5 {
        for factor in [0.99, 1.01] {
            let mut v = best;
            v[i] *= factor;
            let p = BdgdParams::from_values(v[0], v[1], v[2], v[3], v[4]).unwrap();
            let ll = p.loglik(&data).unwrap();
            assert!(
                ll <= ll_best + 1e-9,
                "perturbing parameter {i} by {factor} raised the log-likelihood"
            );
        }
    }
}

#[test]
fn log_space_and_original_space_find_the_same_maximizer() {
    let data = scenario1_data(500, 20250101);
    let report = fit(&data, &truth_config()).unwrap();
    assert!(report.converged);

    // Same likelihood maximized directly in the original coordinates.
    let objective = |theta: &[f64]| -> f64 {
        match BdgdParams::from_values(theta[0], theta[1], theta[2], theta[3], theta[4]) {
            Ok(p) => p.loglik(&data).map(|v| -v).unwrap_or(f64::INFINITY),
            Err(_) => f64::INFINITY,
        }
    };
    let truth = scenario(1).unwrap().params.values();
    let steps: Vec<f64> = truth.iter().map(|v| 0.1 * v).collect();
    let nm = mle::minimize(
        objective,
        &truth,
        &steps,
        &NelderMeadConfig { max_iterations: 6000, f_tolerance: 1e-10 },
    );
    assert!(nm.converged);
    let log_space = report.estimates.values();
    for i in 0..5 {
        let rel = (log_space[i] - nm.x[i]).abs() / nm.x[i].abs();
        assert!(
            rel < 1e-4,
            "parameter {i}: log-space {} vs original-space {}",
            log_space[i],
            nm.x[i]
        );
    }
}

#[test]
fn interval_widths_shrink_like_root_n() {
    // Mean Wald widths at n=400 should sit near half of those at n=100.
    let widths = |n: usize| -> [f64; 5] {
        let mut acc = [0.0; 5];
        let mut used = 0;
        for seed in [1001, 1002, 1003] {
            let data = scenario1_data(n, seed);
            let report = fit(&data, &truth_config()).unwrap();
            if let Some(ivs) = report.wald_intervals {
                for i in 0..5 {
                    acc[i] += ivs[i].width();
                }
                used += 1;
            }
        }
        assert!(used > 0);
        acc.map(|w| w / used as f64)
    };
    let w100 = widths(100);
    let w400 = widths(400);
    for i in 0..5 {
        let ratio = w400[i] / w100[i];
        assert!(
            (0.35..=0.65).contains(&ratio),
            "parameter {i}: width ratio {ratio}"
        );
    }
}

#[test]
fn hessian_is_numerically_symmetric() {
    let data = scenario1_data(400, 55);
    let report = fit(&data, &truth_config()).unwrap();
    let h = mle::hessian_loglik(&data, &report.estimates, 1e-4).unwrap();
    let mut max_entry: f64 = 0.0;
    let mut max_asym: f64 = 0.0;
    for i in 0..5 {
        for j in 0..5 {
            max_entry = max_entry.max(h[i][j].abs());
            max_asym = max_asym.max((h[i][j] - h[j][i]).abs());
        }
    }
    assert!(max_asym / max_entry < 1e-3);
}

#[test]
fn default_warm_start_reaches_the_optimum() {
    let data = scenario1_data(500, 77);
    let with_truth = fit(&data, &truth_config()).unwrap();
    let with_default = fit(&data, &FitConfig::default()).unwrap();
    assert!(with_default.converged);
    let a = with_truth.estimates.values();
    let b = with_default.estimates.values();
    for i in 0..5 {
        let rel = (a[i] - b[i]).abs() / a[i].abs();
        assert!(rel < 1e-3, "parameter {i}: {} vs {}", a[i], b[i]);
    }
}

#[test]
fn report_intervals_contain_their_estimates() {
    let data = scenario1_data(350, 2024);
    let report = fit(&data, &truth_config()).unwrap();
    let est = report.estimates.values();
    let ivs = report.wald_intervals.unwrap();
    for i in 0..5 {
        assert!(ivs[i].contains(est[i]));
    }
    for inf in [report.rho1.unwrap(), report.rho2.unwrap(), report.tau_k.unwrap()] {
        assert!(inf.ci.contains(inf.estimate));
        assert!(inf.std_error >= 0.0);
    }
}
