//! Acceptance gate: every release-blocking claim, one test each, at the
//! stated tolerance. Each test prints one PASS line (visible with
//! `--nocapture`); a failure names the violated bound.

use std::time::Instant;

use num_complex::Complex64;
use phasesim_cli::verify::{
    check_advantage_at_378, check_bootstrap_coverage, check_enumeration_oracle,
    check_enumeration_values, check_heisenberg_scaling, check_kitaev_closed_form,
    check_shot_noise_scaling, check_two_photon_closed_form, run_verify, VerifyLevel,
};
use phasesim_cli::{run_sweep, OutputFormat, SweepSpec};
use phasesim_core::{
    adaptive_feedback, feedback_objective, likelihood, trial_stream, AdaptiveObjective,
    PhaseDistribution, PolicySpec, TAU,
};
use rand::Rng;

fn assert_check(check: phasesim_cli::verify::Check) {
    assert!(check.pass, "FAIL {}: {}", check.name, check.detail);
    println!("PASS {}: {}", check.name, check.detail);
}

#[test]
fn kitaev_variance_matches_closed_form_at_every_stage_count() {
    let start = Instant::now();
    assert_check(check_kitaev_closed_form());
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs() < 120,
        "runtime budget: {elapsed:.1?} exceeds 2 minutes"
    );
}

#[test]
fn two_photon_adaptive_variance_matches_closed_form() {
    let start = Instant::now();
    assert_check(check_two_photon_closed_form());
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs() < 300,
        "runtime budget: {elapsed:.1?} exceeds 5 minutes"
    );
}

#[test]
fn monte_carlo_matches_exact_enumeration_on_every_small_configuration() {
    assert_check(check_enumeration_values());
    assert_check(check_enumeration_oracle());
}

#[test]
fn six_photon_adaptive_reaches_heisenberg_scaling() {
    let start = Instant::now();
    assert_check(check_heisenberg_scaling());
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs() < 1800,
        "runtime budget: {elapsed:.1?} exceeds 30 minutes"
    );
}

#[test]
fn single_pass_schemes_stay_at_the_standard_quantum_limit() {
    assert_check(check_shot_noise_scaling());
}

#[test]
fn adaptive_multipass_beats_the_standard_scheme_at_378_resources() {
    assert_check(check_advantage_at_378());
}

/// A random but reproducible posterior: `updates` Bayes steps from a uniform
/// prior with random pass counts, feedback phases, and outcomes.
fn random_posterior(seed_stream: u64, updates: usize) -> PhaseDistribution {
    let mut rng = trial_stream(9090, seed_stream);
    let mut dist = PhaseDistribution::uniform(64).unwrap();
    for _ in 0..updates {
        let p = *[1u32, 2, 3, 8].get(rng.gen_range(0..4)).unwrap();
        let theta = rng.gen::<f64>() * TAU;
        let u = rng.gen_range(0..2) as u8;
        if dist.marginal(u, p, theta, 1.0) > 1e-9 {
            dist = dist.bayes_update(u, p, theta, 1.0).unwrap();
        }
    }
    dist
}

#[test]
fn distribution_invariants_hold_at_stated_tolerances() {
    // Normalization: c0 stays exactly renormalized and every moment stays
    // inside the unit disk, to 1e-12, over random update histories.
    let mut worst_norm = 0.0f64;
    for h in 0..50 {
        let dist = random_posterior(h, 6);
        worst_norm = worst_norm.max((dist.moment(0) - Complex64::ONE).norm());
        for j in 1..=dist.degree_used() {
            worst_norm = worst_norm.max((dist.moment(j as i64).norm() - 1.0).max(0.0));
        }
    }
    assert!(worst_norm <= 1e-12, "normalization drift {worst_norm:.2e}");
    println!("PASS normalization: max drift {worst_norm:.2e} (tolerance 1e-12)");

    // Moment recursion agrees with brute-force grid quadrature to 1e-8.
    let grid = 4096usize;
    let mut worst_quad = 0.0f64;
    for h in 0..10 {
        let mut rng = trial_stream(9191, h);
        let mut dist = PhaseDistribution::uniform(64).unwrap();
        let mut w = vec![1.0 / grid as f64; grid];
        for _ in 0..6 {
            let p = *[1u32, 2, 3, 8].get(rng.gen_range(0..4)).unwrap();
            let theta = rng.gen::<f64>() * TAU;
            let u = rng.gen_range(0..2) as u8;
            if dist.marginal(u, p, theta, 1.0) <= 1e-9 {
                continue;
            }
            dist = dist.bayes_update(u, p, theta, 1.0).unwrap();
            for (i, wi) in w.iter_mut().enumerate() {
                let phi = TAU * i as f64 / grid as f64;
                *wi *= likelihood(u, phi - theta, p, 1.0).unwrap();
            }
            let total: f64 = w.iter().sum();
            for wi in &mut w {
                *wi /= total;
            }
        }
        let mut c1 = Complex64::ZERO;
        for (i, wi) in w.iter().enumerate() {
            let phi = TAU * i as f64 / grid as f64;
            c1 += wi * Complex64::from_polar(1.0, -phi);
        }
        worst_quad = worst_quad.max((c1 - dist.moment(1).conj()).norm());
    }
    assert!(worst_quad <= 1e-8, "quadrature mismatch {worst_quad:.2e}");
    println!("PASS moment-quadrature: max |Δc1| {worst_quad:.2e} (tolerance 1e-8)");

    // The feedback optimizer attains the dense-grid maximum to 1e-7.
    let dense = 100_000usize;
    let mut worst_gap = 0.0f64;
    for objective in [
        AdaptiveObjective::ExpectedSharpness,
        AdaptiveObjective::ExpectedVariance,
    ] {
        let mut policy = PolicySpec::adaptive();
        policy.objective = objective;
        for h in 0..10 {
            let dist = random_posterior(200 + h, 5);
            for p in [1u32, 2] {
                let theta_opt = adaptive_feedback(&dist, p, 1.0, &policy);
                let f_opt = feedback_objective(&dist, p, 1.0, objective, theta_opt);
                let mut f_grid = f64::NEG_INFINITY;
                for i in 0..dense {
                    let theta = TAU * i as f64 / dense as f64;
                    f_grid = f_grid.max(feedback_objective(&dist, p, 1.0, objective, theta));
                }
                if f_grid.is_finite() {
                    worst_gap = worst_gap.max(f_grid - f_opt);
                }
            }
        }
    }
    assert!(worst_gap <= 1e-7, "optimizer gap {worst_gap:.2e}");
    println!("PASS optimizer-vs-dense-grid: max gap {worst_gap:.2e} (tolerance 1e-7)");

    // Bootstrap intervals cover the true variance at their nominal rate.
    assert_check(check_bootstrap_coverage());
}

#[test]
fn reports_and_sweeps_are_byte_identical_across_reruns() {
    let mut first = Vec::new();
    let mut second = Vec::new();
    let ok_first = run_verify(VerifyLevel::Fast, &mut first).unwrap();
    let ok_second = run_verify(VerifyLevel::Fast, &mut second).unwrap();
    assert!(ok_first && ok_second, "verification must pass on both runs");
    assert_eq!(first, second, "verification report must be byte-identical");
    let report = String::from_utf8(first).unwrap();
    assert!(report.ends_with("verify fast: 5/5 checks passed\n"));
    println!("PASS report-determinism: two fast reports byte-identical");

    let mut spec = SweepSpec::fig3();
    spec.k_values = (0..=2).collect();
    spec.trials = 300;
    spec.bootstrap_b = 999;
    spec.seed = 20240815;
    for format in [OutputFormat::Csv, OutputFormat::Json] {
        spec.format = format;
        let mut a = Vec::new();
        let mut b = Vec::new();
        run_sweep(&spec, &mut a).unwrap();
        run_sweep(&spec, &mut b).unwrap();
        assert_eq!(a, b, "sweep output must be byte-identical ({format:?})");
    }
    println!("PASS sweep-determinism: CSV and JSON reruns byte-identical");
}
