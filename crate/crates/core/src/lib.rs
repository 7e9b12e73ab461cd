//! Simulation engine for entanglement-free, Heisenberg-limited phase
//! estimation.
//!
//! The engine simulates interferometric estimation of an unknown phase φ
//! using single photons that traverse the phase element `p` times, acquiring
//! phase `pφ` at a resource cost of `p`. Measurement outcomes follow the
//! two-point fringe likelihood
//!
//! `P(u | φ) = [1 + (−1)^u · v · cos(p(φ − θ))] / 2`, `u ∈ {0, 1}`,
//!
//! where θ is a controllable feedback phase and `v` the fringe visibility.
//! Three feedback policies are provided:
//!
//! * **Kitaev** ([`policies::kitaev_feedback`]): one photon per stage at
//!   `p = 2^K, …, 1`; θ shifts by `u·π/p` after each outcome, and the final θ
//!   is the estimate. Achieves variance `2/N + 1/N²` at `N = 2^{K+1} − 1`.
//! * **Bayesian-adaptive** ([`policies::adaptive_feedback`]): `M` photons per
//!   stage; before each photon, θ maximizes the expected posterior sharpness
//!   at the probed harmonic. Reduces to Kitaev at `M = 1`, achieves `2/N` at
//!   `M = 2`, and reaches Heisenberg scaling `σ ≈ 1.56π/N` at `M = 6`.
//! * **Nonadaptive** ([`policies::nonadaptive_feedback`]): `N` single-pass
//!   photons with θ swept in π/N steps — the standard-quantum-limit baseline.
//!
//! Posteriors live in [`circular::PhaseDistribution`], a trigonometric-moment
//! vector on which every Bayesian update is exact. [`protocol::run_trial`]
//! simulates single trials; [`protocol::enumerate_exact`] computes exact
//! error variances for small configurations by walking the full outcome tree;
//! [`ensemble::run_ensemble`] runs reproducible parallel Monte Carlo with
//! studentized-bootstrap confidence intervals.
//!
//! # Example
//!
//! ```
//! use phasesim_core::{PolicySpec, TrialConfig};
//!
//! // Exact error variance of the K=2 Kitaev scheme (N = 7 resources).
//! let cfg = TrialConfig::new(2, 1, PolicySpec::kitaev());
//! let v = phasesim_core::enumerate_exact(&cfg).unwrap();
//! assert!((v - (2.0 / 7.0 + 1.0 / 49.0)).abs() < 1e-12);
//!
//! // Monte Carlo ensemble of the same configuration.
//! let summary = phasesim_core::run_ensemble(&cfg, 2000, 1).unwrap();
//! assert!((summary.v_holevo - v).abs() < 0.05);
//! ```
//!
//! # Reproducibility
//!
//! All randomness flows through counter-based per-trial RNG streams
//! ([`rng::trial_stream`]); ensembles and bootstrap intervals are bit-stable
//! for a fixed seed regardless of how many rayon workers run.

pub mod circular;
pub mod ensemble;
pub mod error;
pub mod policies;
pub mod protocol;
pub mod rng;

pub use circular::{likelihood, wrap_angle, PhaseDistribution, TAU};
pub use ensemble::{
    bootstrap_ci, ensemble_holevo, ensemble_holevo_re, holevo_standard_error, reference_curves,
    ensemble_errors, run_ensemble, run_ensemble_with, EnsembleOpts, EnsembleSummary,
    DEFAULT_BOOTSTRAP_B,
};
pub use error::{Error, Result};
pub use policies::{
    adaptive_feedback, feedback_objective, kitaev_feedback, nonadaptive_feedback,
    AdaptiveObjective, FeedbackState, PolicyKind, PolicySpec,
};
pub use protocol::{
    enumerate_exact, resource_count, run_standard_trial, run_trial, sample_outcome, stage_passes,
    MeasurementRecord, TrialConfig, TrialResult, Visibility, MAX_ENUM_PHOTONS, MAX_K,
};
pub use rng::{mix64, salted_stream, trial_stream, SimRng};
