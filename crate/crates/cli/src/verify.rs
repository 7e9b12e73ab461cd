//! Built-in verification suite.
//!
//! `fast` runs the analytic-oracle and enumeration checks (a couple of
//! minutes); `full` adds Monte Carlo scaling-law fits, the head-to-head
//! comparison at N = 378, and bootstrap coverage calibration. Every check
//! uses fixed seeds and fixed-precision formatting, so the report on the
//! data stream is byte-identical across runs; timings go to the diagnostic
//! stream only.

use std::io::Write;
use std::time::Instant;

use phasesim_core::{
    bootstrap_ci, ensemble_errors, ensemble_holevo, enumerate_exact, holevo_standard_error, mix64,
    reference_curves, resource_count, trial_stream, PolicySpec, TrialConfig, TAU,
};
use rand::Rng;

/// Verification depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyLevel {
    /// Analytic oracles and exact enumeration agreement.
    Fast,
    /// Everything in fast, plus scaling-law fits and bootstrap coverage.
    Full,
}

impl std::fmt::Display for VerifyLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            VerifyLevel::Fast => "fast",
            VerifyLevel::Full => "full",
        })
    }
}

/// Outcome of one verification check.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// Seed for a named verification stage; fixed so reports are reproducible.
fn vseed(tag: u64) -> u64 {
    mix64(0x7665_7269 ^ mix64(tag))
}

fn mc_variance(cfg: &TrialConfig, trials: u64, seed: u64) -> (f64, f64) {
    let errors = ensemble_errors(cfg, trials, seed, 0.0).expect("valid built-in configuration");
    (ensemble_holevo(&errors), holevo_standard_error(&errors))
}

/// Least-squares slope of y on x.
fn lsq_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Closed-form reference curve values at sanity points.
pub fn check_reference_values() -> Check {
    let (_, hl2, _) = reference_curves(2);
    let (sql, hl, asym) = reference_curves(378);
    let expect = [
        (hl2, 1.0),
        (sql, 5.143444998736397e-2),
        (hl, 8.26753744872614e-3),
        (asym, 1.2965303014815018e-2),
    ];
    let worst = expect
        .iter()
        .map(|(got, want)| ((got - want) / want).abs())
        .fold(0.0, f64::max);
    Check {
        name: "reference-values",
        pass: worst <= 1e-15,
        detail: format!("max relative deviation {worst:.1e} across 4 closed-form values"),
    }
}

/// Exact enumeration against closed-form variances.
pub fn check_enumeration_values() -> Check {
    let cases: [(TrialConfig, f64, f64, &str); 4] = [
        (
            TrialConfig::new(0, 1, PolicySpec::kitaev()),
            3.0,
            1e-12,
            "kitaev K=0",
        ),
        (
            TrialConfig::new(2, 1, PolicySpec::kitaev()),
            15.0 / 49.0,
            1e-9,
            "kitaev K=2",
        ),
        (
            TrialConfig::new(2, 1, PolicySpec::adaptive()),
            15.0 / 49.0,
            1e-9,
            "adaptive M=1 K=2",
        ),
        (
            TrialConfig::new(1, 2, PolicySpec::adaptive()),
            1.0 / 3.0,
            1e-9,
            "adaptive M=2 K=1",
        ),
    ];
    let mut pass = true;
    let mut worst = 0.0f64;
    for (cfg, want, tol, _label) in &cases {
        let got = enumerate_exact(cfg).expect("enumerable configuration");
        let diff = (got - want).abs();
        worst = worst.max(diff);
        if diff > *tol {
            pass = false;
        }
    }
    Check {
        name: "enumeration-values",
        pass,
        detail: format!("max |deviation| {worst:.2e} across 4 closed-form points"),
    }
}

/// Kitaev Monte Carlo vs the 2/N + 1/N² law, K = 0..5, 10⁵ trials/point.
pub fn check_kitaev_closed_form() -> Check {
    let trials = 100_000;
    let mut worst = 0.0f64;
    for k in 0..=5u32 {
        let cfg = TrialConfig::new(k, 1, PolicySpec::kitaev());
        let n = resource_count(k, 1).unwrap() as f64;
        let target = 2.0 / n + 1.0 / (n * n);
        let (v, se) = mc_variance(&cfg, trials, vseed(0x1100 + k as u64));
        worst = worst.max(((v - target) / se).abs());
    }
    Check {
        name: "kitaev-closed-form",
        pass: worst <= 3.0,
        detail: format!("max |z| = {worst:.2} over K=0..5 at {trials} trials (limit 3)"),
    }
}

/// Two-photon adaptive Monte Carlo vs the 2/N law, K = 0..4, 10⁵ trials.
pub fn check_two_photon_closed_form() -> Check {
    let trials = 100_000;
    let mut worst = 0.0f64;
    for k in 0..=4u32 {
        let cfg = TrialConfig::new(k, 2, PolicySpec::adaptive());
        let n = resource_count(k, 2).unwrap() as f64;
        let (v, se) = mc_variance(&cfg, trials, vseed(0x2200 + k as u64));
        worst = worst.max(((v - 2.0 / n) / se).abs());
    }
    Check {
        name: "two-photon-closed-form",
        pass: worst <= 3.0,
        detail: format!("max |z| = {worst:.2} over K=0..4 at {trials} trials (limit 3)"),
    }
}

/// Every enumerable configuration (photon count ≤ 10): Monte Carlo at
/// 2×10⁵ trials agrees with exact enumeration within the 99% band.
pub fn check_enumeration_oracle() -> Check {
    let trials = 200_000;
    let mut configs: Vec<TrialConfig> = Vec::new();
    for k in 0..=9u32 {
        configs.push(TrialConfig::new(k, 1, PolicySpec::kitaev()));
        configs.push(TrialConfig::new(k, 1, PolicySpec::adaptive()));
    }
    for k in 0..=4u32 {
        configs.push(TrialConfig::new(k, 2, PolicySpec::adaptive()));
    }
    for n in [2u64, 6, 10] {
        configs.push(TrialConfig::standard(n, 1.0).unwrap());
    }
    let mut worst = 0.0f64;
    for (i, cfg) in configs.iter().enumerate() {
        let exact = enumerate_exact(cfg).expect("enumerable configuration");
        let (v, se) = mc_variance(cfg, trials, vseed(0x3300 + i as u64));
        worst = worst.max(((v - exact) / se).abs());
    }
    Check {
        name: "enumeration-oracle",
        pass: worst <= 2.576,
        detail: format!(
            "max |z| = {worst:.2} over {} configurations at {trials} trials (99% limit 2.576)",
            configs.len()
        ),
    }
}

/// Six-photon adaptive scaling: log-log slope of σ vs N over K = 3..5 and
/// the σ band at N = 378.
pub fn check_heisenberg_scaling() -> Check {
    let trials = 10_000;
    let mut pts = Vec::new();
    let mut sigma_378 = f64::NAN;
    for k in 3..=5u32 {
        let cfg = TrialConfig::new(k, 6, PolicySpec::adaptive());
        let n = resource_count(k, 6).unwrap() as f64;
        let (v, _) = mc_variance(&cfg, trials, vseed(0x4400 + k as u64));
        let sigma = v.sqrt();
        if k == 5 {
            sigma_378 = sigma;
        }
        pts.push((n.ln(), sigma.ln()));
    }
    let slope = lsq_slope(&pts);
    let band = sigma_378 / (std::f64::consts::PI / 378.0);
    let pass = (slope + 1.0).abs() <= 0.07 && (1.3..=1.8).contains(&band);
    Check {
        name: "heisenberg-scaling",
        pass,
        detail: format!(
            "slope {slope:.3} (want -1.00±0.07), sigma(378) = {band:.3}·pi/378 (want 1.3..1.8) at {trials} trials"
        ),
    }
}

/// Shot-noise scaling: nonadaptive slope at the six-photon-matched N values
/// (K = 1..5) and Kitaev slope over K = 2..5.
pub fn check_shot_noise_scaling() -> Check {
    let mut non_pts = Vec::new();
    for k in 1..=5u32 {
        let n = resource_count(k, 6).unwrap();
        let cfg = TrialConfig::standard(n, 1.0).unwrap();
        let (v, _) = mc_variance(&cfg, 20_000, vseed(0x5500 + k as u64));
        non_pts.push(((n as f64).ln(), v.sqrt().ln()));
    }
    let non_slope = lsq_slope(&non_pts);

    let mut kit_pts = Vec::new();
    for k in 2..=5u32 {
        let cfg = TrialConfig::new(k, 1, PolicySpec::kitaev());
        let n = resource_count(k, 1).unwrap() as f64;
        let (v, _) = mc_variance(&cfg, 100_000, vseed(0x5600 + k as u64));
        kit_pts.push((n.ln(), v.sqrt().ln()));
    }
    let kit_slope = lsq_slope(&kit_pts);

    let pass = (non_slope + 0.5).abs() <= 0.05 && (kit_slope + 0.5).abs() <= 0.05;
    Check {
        name: "shot-noise-scaling",
        pass,
        detail: format!(
            "nonadaptive slope {non_slope:.3} over K=1..5, kitaev slope {kit_slope:.3} over K=2..5 (want -0.50±0.05)"
        ),
    }
}

/// Head-to-head at N = 378: six-photon adaptive versus the nonadaptive
/// baseline, in dB, plus the implied standard-scheme resource equivalent.
pub fn check_advantage_at_378() -> Check {
    let adaptive = TrialConfig::new(5, 6, PolicySpec::adaptive());
    let (v_adaptive, _) = mc_variance(&adaptive, 20_000, vseed(0x6600));
    let standard = TrialConfig::standard(378, 1.0).unwrap();
    let (v_standard, _) = mc_variance(&standard, 20_000, vseed(0x6601));
    let db = 10.0 * (v_standard / v_adaptive).log10();
    let equivalent = 1.0 / v_adaptive;
    let pass = db > 10.0 && equivalent > 4000.0;
    Check {
        name: "advantage-at-378",
        pass,
        detail: format!(
            "{db:.1} dB below nonadaptive (want > 10), resource equivalent {equivalent:.0} (want > 4000)"
        ),
    }
}

/// Coverage of the 95% bootstrap interval over 500 synthetic ensembles of
/// 1000 wrapped-normal errors (σ = 0.1).
pub fn check_bootstrap_coverage() -> Check {
    let sigma = 0.1f64;
    let v_true = (sigma * sigma).exp() - 1.0;
    let reps = 500;
    let m = 1000;
    let mut covered = 0u32;
    for rep in 0..reps {
        let mut rng = trial_stream(vseed(0x7700), rep as u64);
        let errors: Vec<f64> = (0..m)
            .map(|_| {
                let u1: f64 = rng.gen::<f64>().max(1e-300);
                let u2: f64 = rng.gen();
                sigma * (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
            })
            .collect();
        let (lo, hi) = bootstrap_ci(&errors, 999, vseed(0x7701 + rep as u64)).unwrap();
        if lo <= v_true && v_true <= hi {
            covered += 1;
        }
    }
    let rate = covered as f64 / reps as f64;
    Check {
        name: "bootstrap-coverage",
        pass: (0.92..=0.98).contains(&rate),
        detail: format!(
            "95% CI covered truth in {covered}/{reps} ensembles ({:.1}%, want 92..98)",
            100.0 * rate
        ),
    }
}

/// The checks for one verification level, in report order.
pub fn checks_for(level: VerifyLevel) -> Vec<fn() -> Check> {
    let mut list: Vec<fn() -> Check> = vec![
        check_reference_values,
        check_enumeration_values,
        check_kitaev_closed_form,
        check_two_photon_closed_form,
        check_enumeration_oracle,
    ];
    if level == VerifyLevel::Full {
        list.extend([
            check_heisenberg_scaling as fn() -> Check,
            check_shot_noise_scaling,
            check_advantage_at_378,
            check_bootstrap_coverage,
        ]);
    }
    list
}

/// Run the verification suite, writing one PASS/FAIL line per check plus a
/// summary to `out`. Returns whether every check passed.
///
/// The report stream is byte-identical across runs; per-check wall times go
/// to standard error.
pub fn run_verify<W: Write>(level: VerifyLevel, out: &mut W) -> std::io::Result<bool> {
    let mut passed = 0usize;
    let checks = checks_for(level);
    let total = checks.len();
    for check_fn in checks {
        let start = Instant::now();
        let check = check_fn();
        eprintln!("({:.1?}) {}", start.elapsed(), check.name);
        writeln!(
            out,
            "{} {}: {}",
            if check.pass { "PASS" } else { "FAIL" },
            check.name,
            check.detail
        )?;
        if check.pass {
            passed += 1;
        }
    }
    writeln!(out, "verify {level}: {passed}/{total} checks passed")?;
    out.flush()?;
    Ok(passed == total)
}
