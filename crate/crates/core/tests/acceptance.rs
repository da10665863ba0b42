//! Acceptance suite: one test per exit criterion, each printing a PASS line
//! with the measured values (visible under `--nocapture`).
//!
//! Criteria 7-9 are desk-scale statistical checks with pinned seeds; the
//! full-scale grid (12 scenarios x 19 sizes x 1000 replicates) is not
//! reproduced here by design.

use defectiva::bayes::{run_mcmc, McmcConfig, PriorBox};
use defectiva::io::write_dataset;
use defectiva::mle::{wald_interval, FitConfig};
use defectiva::nonparam::{binned_hazard, kaplan_meier, UnivariateSample};
use defectiva::simulate::{generate, scenario, scenario_catalog, GenConfig};
use defectiva::study::{coverage_band, run_study, StudyConfig, TrackedParam};
use defectiva::{fit, ClaytonPhi, DGParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn assert_close(label: &str, got: f64, want: f64, tol: f64) {
    assert!(
        (got - want).abs() <= tol,
        "{label}: got {got}, want {want} within {tol}"
    );
}

#[test]
fn criterion_01_closed_form_oracles() {
    assert_close(
        "cure_rate(1.0, 0.8)",
        DGParams::new(1.0, 0.8).unwrap().cure_rate(),
        0.2865,
        5e-5,
    );
    assert_close(
        "cure_rate(0.5, 1.5)",
        DGParams::new(0.5, 1.5).unwrap().cure_rate(),
        0.7165,
        5e-5,
    );
    for (phi, want) in [(1.0, 0.3333), (3.0, 0.6000), (10.0, 0.8333)] {
        assert_close(
            &format!("kendall_tau({phi})"),
            ClaytonPhi::new(phi).unwrap().kendall_tau(),
            want,
            5e-5,
        );
    }
    println!("criterion 1 (closed-form oracles): PASS");
}

#[test]
fn criterion_02_spearman_quadrature() {
    for (phi, want) in [(1.0, 0.4790), (3.0, 0.7864), (10.0, 0.9583)] {
        let got = ClaytonPhi::new(phi).unwrap().spearman_rho().unwrap();
        assert_close(&format!("spearman_rho({phi})"), got, want, 1e-3);
    }
    println!("criterion 2 (spearman quadrature): PASS");
}

#[test]
fn criterion_03_paper_table_internal_consistency() {
    let rho1 = DGParams::new(0.1163, 0.2877).unwrap().cure_rate();
    assert_close("rho1 from table estimates", rho1, 0.6674, 1e-3);
    assert_close(
        "tau_k at phi=8.2022",
        ClaytonPhi::new(8.2022).unwrap().kendall_tau(),
        0.8039,
        1e-4,
    );
    assert_close(
        "tau_k at phi=7.8998",
        ClaytonPhi::new(7.8998).unwrap().kendall_tau(),
        0.7979,
        1e-4,
    );
    let ci = wald_interval(0.6674, 0.1096, 0.95);
    assert_close("rho1 CI lower", ci.lo, 0.4525, 1e-3);
    assert_close("rho1 CI upper", ci.hi, 0.8823, 1e-3);
    println!("criterion 3 (table internal consistency): PASS");
}

#[test]
fn criterion_04_coverage_band() {
    let band = coverage_band(1000, 0.95);
    assert_close("band lower", band.lo, 0.9365, 5e-5);
    assert_close("band upper", band.hi, 0.9635, 5e-5);
    println!("criterion 4 (coverage band): PASS");
}

#[test]
fn criterion_05_finite_difference_equivalence() {
    let grid: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 5.0];
    for sc in scenario_catalog() {
        let p = &sc.params;
        let survival = |t1: f64, t2: f64| p.joint_survival(t1, t2).unwrap();
        for &t1 in &grid {
            for &t2 in &grid {
                // Mixed second difference with one Richardson step, so the
                // oracle keeps ~1e-6 relative accuracy even where the
                // density is ~1e-8.
                let h = 0.04 * t1.min(t2).min(1.0);
                let mixed = |h: f64| {
                    (survival(t1 + h, t2 + h) - survival(t1 + h, t2 - h)
                        - survival(t1 - h, t2 + h)
                        + survival(t1 - h, t2 - h))
                        / (4.0 * h * h)
                };
                let oracle = (4.0 * mixed(0.5 * h) - mixed(h)) / 3.0;
                let density = p.log_density(t1, t2).unwrap().exp();
                let rel = (density - oracle).abs() / oracle.abs();
                assert!(
                    rel < 1e-4,
                    "scenario {} density at ({t1},{t2}): rel {rel}",
                    sc.id
                );

                // First differences need the same Richardson treatment: at
                // phi=10 the partial can sit eight orders below the joint
                // survival, where a naive small step is all roundoff.
                let h1 = 0.05 * t1.min(1.0);
                let d1 = |h: f64| -(survival(t1 + h, t2) - survival(t1 - h, t2)) / (2.0 * h);
                let fd1 = (4.0 * d1(0.5 * h1) - d1(h1)) / 3.0;
                let p1 = p.log_partial_t1(t1, t2).unwrap().exp();
                assert!(
                    (p1 - fd1).abs() / fd1.abs() < 1e-5,
                    "scenario {} partial t1 at ({t1},{t2})",
                    sc.id
                );
                let h2 = 0.05 * t2.min(1.0);
                let d2 = |h: f64| -(survival(t1, t2 + h) - survival(t1, t2 - h)) / (2.0 * h);
                let fd2 = (4.0 * d2(0.5 * h2) - d2(h2)) / 3.0;
                let p2 = p.log_partial_t2(t1, t2).unwrap().exp();
                assert!(
                    (p2 - fd2).abs() / fd2.abs() < 1e-5,
                    "scenario {} partial t2 at ({t1},{t2})",
                    sc.id
                );
            }
        }
    }
    println!("criterion 5 (finite-difference equivalence, 12 scenarios): PASS");
}

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

#[test]
fn criterion_06_defective_mass() {
    let p = scenario(1).unwrap().params;
    for margin in [p.margin1(), p.margin2()] {
        let mass = simpson(|t| margin.density(t).unwrap(), 0.0, 60.0, 20_000);
        assert_close("marginal event mass", mass, 1.0 - margin.cure_rate(), 1e-6);
    }

    // Joint mass decomposition: the density integral is the both-finite
    // probability; the strips and the atom come from the survival limits.
    let t_max = 30.0;
    let n = 300;
    // The density needs strictly positive times; nudging the grid origin by
    // 1e-9 changes the integral far below the 1e-2 tolerance.
    let joint_density_mass = simpson(
        |t1| simpson(|t2| p.log_density(t1.max(1e-9), t2.max(1e-9)).unwrap().exp(), 0.0, t_max, n),
        0.0,
        t_max,
        n,
    );
    let joint_cure = p.joint_cure_plateau();
    let strip1 = p.rho1() - joint_cure;
    let strip2 = p.rho2() - joint_cure;
    let total = joint_density_mass + strip1 + strip2 + joint_cure;
    assert_close("joint mass decomposition", total, 1.0, 1e-2);
    println!(
        "criterion 6 (defective mass): PASS (joint decomposition total {total:.5})"
    );
}

#[test]
fn criterion_07_estimator_recovery_desk_scale() {
    // Mean cure-rate recovery at n=1000 over 50 replicates.
    let recovery = run_study(&StudyConfig {
        scenarios: vec![1],
        sample_sizes: vec![1000],
        replicates: 50,
        seed: 20240701,
        nominal_coverage: 0.95,
    })
    .unwrap();
    let cell = &recovery.cells[0];
    let rho1 = cell
        .per_param
        .iter()
        .find(|pc| pc.param == TrackedParam::Rho1)
        .unwrap();
    let mean_rho1 = rho1.nominal + rho1.bias;
    assert_close("mean rho1 at n=1000", mean_rho1, 0.2865, 0.04);

    // MSE must fall from n=100 to n=400 for every tracked quantity.
    let study = run_study(&StudyConfig {
        scenarios: vec![1],
        sample_sizes: vec![100, 400],
        replicates: 150,
        seed: 20240702,
        nominal_coverage: 0.95,
    })
    .unwrap();
    let at = |n: usize, p: TrackedParam| {
        study
            .cells
            .iter()
            .find(|c| c.n == n)
            .unwrap()
            .per_param
            .iter()
            .find(|pc| pc.param == p)
            .unwrap()
            .mse
    };
    for p in TrackedParam::ALL {
        let (m100, m400) = (at(100, p), at(400, p));
        assert!(
            m400 < m100,
            "{}: MSE(400) = {m400} not below MSE(100) = {m100}",
            p.name()
        );
    }
    println!(
        "criterion 7 (estimator recovery): PASS (mean rho1 {mean_rho1:.4}, MSE monotone for all 8 quantities)"
    );
}

#[test]
fn criterion_08_coverage_study_desk_scale() {
    let study = run_study(&StudyConfig {
        scenarios: vec![1],
        sample_sizes: vec![200],
        replicates: 200,
        seed: 20240703,
        nominal_coverage: 0.95,
    })
    .unwrap();
    let cell = &study.cells[0];
    let band = coverage_band(200, 0.95);
    let rho1 = cell
        .per_param
        .iter()
        .find(|pc| pc.param == TrackedParam::Rho1)
        .unwrap();
    assert!(
        band.contains(rho1.coverage),
        "rho1 coverage {} outside ({}, {})",
        rho1.coverage,
        band.lo,
        band.hi
    );
    let monotone_fraction = cell.n_monotone as f64 / 200.0;
    assert!(monotone_fraction < 0.10, "monotone fraction {monotone_fraction}");
    println!(
        "criterion 8 (coverage study): PASS (rho1 coverage {:.4} in ({:.4}, {:.4}), monotone {:.1}%)",
        rho1.coverage,
        band.lo,
        band.hi,
        100.0 * monotone_fraction
    );
}

#[test]
fn criterion_09_cross_engine_agreement() {
    let truth = scenario(1).unwrap().params;
    let data = generate(&GenConfig::new(truth, 500, 31415)).unwrap();
    let ml = fit(
        &data,
        &FitConfig { initial: Some(truth), ..FitConfig::default() },
    )
    .unwrap();
    assert!(ml.converged);
    let wald = ml.wald_intervals.unwrap();

    let mcmc = run_mcmc(
        &data,
        &PriorBox::default_noninformative(),
        &McmcConfig { seed: 2024, ..McmcConfig::default() },
    )
    .unwrap();
    for (i, summary) in mcmc.summary.params.iter().enumerate() {
        assert!(
            wald[i].contains(summary.median),
            "parameter {i}: posterior median {} outside ML interval ({}, {})",
            summary.median,
            wald[i].lo,
            wald[i].hi
        );
    }
    println!("criterion 9 (cross-engine agreement): PASS");
}

#[test]
fn criterion_10_real_data_tables_not_reproducible() {
    // The four clinical datasets are not distributed with the source
    // material; criterion 3's internal-consistency checks stand in for the
    // published tables. Nothing to run here beyond recording that fact.
    println!("criterion 10 (real-data tables): SKIPPED BY DESIGN, criterion 3 substitutes");
}

#[test]
fn criterion_11_nonparametric_oracles() {
    let km = kaplan_meier(
        &UnivariateSample::new(vec![1.0, 2.0, 3.0], vec![true, true, true]).unwrap(),
    );
    // Hand product-limit values, written as the same factor products the
    // estimator forms so the match is bit-exact.
    let s1 = 1.0 - 1.0 / 3.0;
    assert_eq!(km.values(), &[1.0, s1, s1 * (1.0 - 1.0 / 2.0), 0.0]);
    let km = kaplan_meier(
        &UnivariateSample::new(vec![1.0, 2.0, 3.0, 4.0], vec![true, false, true, false])
            .unwrap(),
    );
    assert_eq!(km.eval(1.0), 0.75);
    assert_eq!(km.eval(3.5), 0.375);

    let mut rng = ChaCha8Rng::seed_from_u64(161803);
    let rate = 0.5;
    let cutoff = 2.0;
    let mut times = Vec::new();
    let mut events = Vec::new();
    for _ in 0..10_000 {
        let t = -rng.gen::<f64>().max(f64::MIN_POSITIVE).ln() / rate;
        times.push(t.min(cutoff));
        events.push(t < cutoff);
    }
    let bins =
        binned_hazard(&UnivariateSample::new(times, events).unwrap(), 10).unwrap();
    for bin in &bins {
        assert!(
            (bin.hazard - rate).abs() < 0.2 * rate,
            "bin {} hazard {}",
            bin.midpoint,
            bin.hazard
        );
    }
    println!("criterion 11 (nonparametric oracles): PASS");
}

#[test]
fn criterion_12_determinism() {
    let config = GenConfig::new(scenario(1).unwrap().params, 300, 999);
    let (a, b) = (generate(&config).unwrap(), generate(&config).unwrap());
    let mut bytes_a = Vec::new();
    let mut bytes_b = Vec::new();
    write_dataset(&mut bytes_a, &a).unwrap();
    write_dataset(&mut bytes_b, &b).unwrap();
    assert_eq!(bytes_a, bytes_b, "dataset bytes differ between identical runs");

    let study_config = StudyConfig {
        scenarios: vec![1],
        sample_sizes: vec![80],
        replicates: 10,
        seed: 5,
        nominal_coverage: 0.95,
    };
    let s1 = serde_json::to_string(&run_study(&study_config).unwrap()).unwrap();
    let s2 = serde_json::to_string(&run_study(&study_config).unwrap()).unwrap();
    assert_eq!(s1, s2, "study outputs differ between identical runs");

    let data = generate(&config).unwrap();
    let mcfg = McmcConfig {
        iterations: 4000,
        burn_in: 1000,
        thin: 10,
        proposal_scales: [0.25; 5],
        seed: 77,
    };
    let c1 = run_mcmc(&data, &PriorBox::default_noninformative(), &mcfg).unwrap();
    let c2 = run_mcmc(&data, &PriorBox::default_noninformative(), &mcfg).unwrap();
    assert_eq!(c1.chain, c2.chain);
    println!("criterion 12 (determinism): PASS");
}
