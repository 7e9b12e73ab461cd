//! Complete estimation trials: the descending pass schedule, outcome
//! sampling, resource accounting, and an exact enumeration oracle.
//!
//! A trial with parameters `(K, M)` sends `M` photons through `p = 2^K`
//! passes, then `M` through `2^{K−1}`, and so on down to `p = 1`, consuming
//! `N = M·(2^{K+1} − 1)` resources in `M·(K+1)` photons. The nonadaptive
//! standard scheme is the degenerate schedule `K = 0` with `M = N`
//! single-pass photons.

use std::collections::BTreeMap;

use crate::circular::{likelihood, wrap_angle, PhaseDistribution, TAU};
use crate::error::{Error, Result};
use crate::policies::{
    adaptive_feedback, kitaev_feedback, nonadaptive_feedback, FeedbackState, PolicyKind,
    PolicySpec,
};
use crate::rng::SimRng;
use num_complex::Complex64;
use rand::Rng;

/// Largest supported pass exponent (`2^30` passes; `N` close to `2^31`).
pub const MAX_K: u32 = 30;

/// Photon budget accepted by [`enumerate_exact`] (`2^16` outcome branches).
pub const MAX_ENUM_PHOTONS: u32 = 16;

/// Total resources `N = M·(2^{K+1} − 1)`.
pub fn resource_count(k: u32, m: u32) -> Result<u64> {
    if k > MAX_K {
        return Err(Error::InvalidArgument(format!(
            "K must be at most {MAX_K}, got {k}"
        )));
    }
    if m < 1 {
        return Err(Error::InvalidArgument("M must be at least 1".into()));
    }
    Ok(m as u64 * ((1u64 << (k + 1)) - 1))
}

/// Stage pass counts in execution order: `2^K, 2^{K−1}, …, 1`.
pub fn stage_passes(k: u32) -> Vec<u32> {
    (0..=k).rev().map(|e| 1u32 << e).collect()
}

/// Fringe visibility, either one value for every stage or a per-pass map.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Visibility {
    /// The same visibility at every pass count.
    Uniform(f64),
    /// Per-pass-count visibilities; must cover every stage in the schedule.
    PerPass(BTreeMap<u32, f64>),
}

impl Default for Visibility {
    fn default() -> Self {
        Visibility::Uniform(1.0)
    }
}

impl Visibility {
    /// Visibility at pass count `p`.
    pub fn at(&self, p: u32) -> f64 {
        match self {
            Visibility::Uniform(v) => *v,
            Visibility::PerPass(map) => map.get(&p).copied().unwrap_or(1.0),
        }
    }

    fn validate(&self, k: u32) -> Result<()> {
        match self {
            Visibility::Uniform(v) => {
                if !(0.0..=1.0).contains(v) {
                    return Err(Error::InvalidArgument(format!(
                        "visibility must lie in [0, 1], got {v}"
                    )));
                }
            }
            Visibility::PerPass(map) => {
                for (p, v) in map {
                    if !(0.0..=1.0).contains(v) {
                        return Err(Error::InvalidArgument(format!(
                            "visibility must lie in [0, 1], got {v} at p={p}"
                        )));
                    }
                }
                for p in stage_passes(k) {
                    if !map.contains_key(&p) {
                        return Err(Error::InvalidArgument(format!(
                            "per-pass visibility map lacks an entry for scheduled p={p}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Everything that determines one simulated estimation run.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrialConfig {
    /// Maximum pass exponent; the first stage uses `2^K` passes.
    pub k: u32,
    /// Photons per stage.
    pub m: u32,
    /// Feedback rule and optimizer parameters.
    pub policy: PolicySpec,
    /// Fringe visibility (scalar or per-pass).
    pub visibility: Visibility,
    /// Default RNG seed for this configuration.
    pub seed: u64,
}

impl TrialConfig {
    /// A multipass configuration with default visibility and seed.
    pub fn new(k: u32, m: u32, policy: PolicySpec) -> Self {
        Self {
            k,
            m,
            policy,
            visibility: Visibility::default(),
            seed: 0,
        }
    }

    /// The standard (nonadaptive, single-pass) scheme with `n` resources:
    /// `K = 0`, `M = n`.
    pub fn standard(n: u64, visibility: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument("N must be at least 1".into()));
        }
        if n > u32::MAX as u64 {
            return Err(Error::InvalidArgument(format!(
                "standard scheme limited to N ≤ {}, got {n}",
                u32::MAX
            )));
        }
        Ok(Self {
            k: 0,
            m: n as u32,
            policy: PolicySpec::nonadaptive(),
            visibility: Visibility::Uniform(visibility),
            seed: 0,
        })
    }

    /// Total resources `N` this configuration consumes per trial.
    pub fn resources(&self) -> Result<u64> {
        resource_count(self.k, self.m)
    }

    /// Photons per trial, `M·(K+1)`.
    pub fn photons(&self) -> u32 {
        self.m * (self.k + 1)
    }

    pub fn validate(&self) -> Result<()> {
        resource_count(self.k, self.m)?;
        self.policy.validate()?;
        self.visibility.validate(self.k)?;
        match self.policy.kind {
            PolicyKind::Kitaev if self.m != 1 => Err(Error::InvalidArgument(format!(
                "kitaev policy requires M = 1, got M = {}",
                self.m
            ))),
            PolicyKind::Nonadaptive if self.k != 0 => Err(Error::InvalidArgument(format!(
                "nonadaptive policy runs single-pass photons only (K = 0), got K = {}",
                self.k
            ))),
            _ => Ok(()),
        }
    }
}

/// One photon's measurement: pass count, feedback phase used, outcome.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MeasurementRecord {
    pub p: u32,
    pub theta: f64,
    pub u: u8,
}

/// The outcome of one simulated trial.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrialResult {
    pub phi_true: f64,
    /// Estimate in `[0, 2π)`.
    pub phi_est: f64,
    pub records: Vec<MeasurementRecord>,
    pub resources_used: u64,
}

/// Sample one outcome bit: `u = 0` with probability
/// `likelihood(0, φ−θ, p, v)`. Consumes exactly one uniform variate.
pub fn sample_outcome(
    phi: f64,
    theta: f64,
    p: u32,
    visibility: f64,
    rng: &mut SimRng,
) -> Result<u8> {
    let p0 = likelihood(0, phi - theta, p, visibility)?;
    let x: f64 = rng.gen();
    Ok(if x < p0 { 0 } else { 1 })
}

/// Run one complete estimation trial.
///
/// Draws `θ_init` uniform on `[0, 2π)` (one variate), then walks the
/// schedule. Kitaev trials read the estimate out of the final feedback phase;
/// adaptive and nonadaptive trials read it out of the posterior's circular
/// mean. The adaptive policy measures its first photon at `θ_init` and
/// optimizes every subsequent choice.
///
/// If the final posterior's circular mean is undefined (its first moment is
/// exactly zero, which happens with positive probability for outcome
/// patterns whose likelihood is rotationally symmetric), the estimate falls
/// back to `θ_init`, which contributes zero expected signal to the ensemble.
pub fn run_trial(cfg: &TrialConfig, phi_true: f64, rng: &mut SimRng) -> Result<TrialResult> {
    cfg.validate()?;
    let resources = cfg.resources()?;
    let theta_init = rng.gen::<f64>() * TAU;
    let mut state = FeedbackState::new(theta_init);
    let mut records = Vec::with_capacity(cfg.photons() as usize);

    let phi_est = match cfg.policy.kind {
        PolicyKind::Kitaev => {
            for p in stage_passes(cfg.k) {
                let v = cfg.visibility.at(p);
                let theta = state.theta;
                let u = sample_outcome(phi_true, theta, p, v, rng)?;
                records.push(MeasurementRecord { p, theta, u });
                state = kitaev_feedback(&state, u, p);
            }
            wrap_angle(state.theta)
        }
        PolicyKind::Adaptive | PolicyKind::Nonadaptive => {
            if resources > (1 << 26) {
                return Err(Error::InvalidArgument(format!(
                    "posterior capacity {resources} too large; reduce K or M"
                )));
            }
            let mut dist = PhaseDistribution::uniform(resources as usize)?;
            for p in stage_passes(cfg.k) {
                let v = cfg.visibility.at(p);
                for _ in 0..cfg.m {
                    let theta = match cfg.policy.kind {
                        PolicyKind::Nonadaptive => nonadaptive_feedback(&state, resources),
                        _ if state.photon_index == 0 => theta_init,
                        _ => adaptive_feedback(&dist, p, v, &cfg.policy),
                    };
                    let u = sample_outcome(phi_true, theta, p, v, rng)?;
                    records.push(MeasurementRecord { p, theta, u });
                    dist = dist.bayes_update(u, p, theta, v)?;
                    state.photon_index += 1;
                }
            }
            match dist.estimate() {
                Ok(est) => est,
                // An outcome pattern whose joint likelihood is invariant
                // under a 2π/k rotation (e.g. four of the 64 six-photon
                // standard-scheme patterns) has a posterior whose first
                // moment is exactly zero: the data identify k equally
                // probable phases and single out none of them. Fall back to
                // the uniformly drawn reference phase. Conditional on such a
                // pattern the estimate then carries zero expected signal,
                // the same weight the branch gets under exact enumeration,
                // so the ensemble variance is unbiased by the convention.
                Err(Error::UndefinedEstimate) => wrap_angle(theta_init),
                Err(e) => return Err(e),
            }
        }
    };

    let resources_used: u64 = records.iter().map(|r| r.p as u64).sum();
    debug_assert_eq!(resources_used, resources);
    Ok(TrialResult {
        phi_true,
        phi_est,
        records,
        resources_used,
    })
}

/// Run one trial of the standard scheme: `n` single-pass photons with the
/// nonadaptive π/N sweep.
pub fn run_standard_trial(
    n: u64,
    visibility: f64,
    phi_true: f64,
    rng: &mut SimRng,
) -> Result<TrialResult> {
    run_trial(&TrialConfig::standard(n, visibility)?, phi_true, rng)
}

/// Exact Holevo variance of a configuration's estimate-error distribution,
/// by full enumeration of the outcome tree.
///
/// By phase covariance, randomizing `θ_init` with `φ` fixed is equivalent to
/// fixing `θ_init = 0` and treating `φ` as uniform; the enumeration does the
/// latter. Each outcome branch carries its normalized posterior and its
/// probability `P(branch | φ)` integrated over φ, and contributes
/// `∫ P(branch|φ) e^{i(φ_est − φ)} dφ/2π = P(branch)·e^{iφ_est}·conj(c_1)`
/// with `c_1` the branch posterior's first moment (for Kitaev,
/// `φ_est = θ_final(branch)`). The result is `|Σ branches|^{−2} − 1`.
///
/// Requires `M·(K+1) ≤ 16` (at most `2^16` branches).
pub fn enumerate_exact(cfg: &TrialConfig) -> Result<f64> {
    cfg.validate()?;
    let photons = cfg.photons();
    if photons > MAX_ENUM_PHOTONS {
        return Err(Error::BranchBound {
            photons,
            max: MAX_ENUM_PHOTONS,
        });
    }
    let resources = cfg.resources()?;
    let passes: Vec<u32> = stage_passes(cfg.k)
        .into_iter()
        .flat_map(|p| std::iter::repeat_n(p, cfg.m as usize))
        .collect();
    let prior = PhaseDistribution::uniform(resources as usize)?;
    let mut z = Complex64::ZERO;
    walk_branches(
        cfg,
        &passes,
        0,
        &prior,
        1.0,
        0.0,
        resources,
        &mut z,
    )?;
    let s = z.norm();
    Ok(if s == 0.0 {
        f64::INFINITY
    } else {
        (s.powi(-2) - 1.0).max(0.0)
    })
}

#[allow(clippy::too_many_arguments)]
fn walk_branches(
    cfg: &TrialConfig,
    passes: &[u32],
    idx: usize,
    dist: &PhaseDistribution,
    prob: f64,
    theta_kitaev: f64,
    resources: u64,
    z: &mut Complex64,
) -> Result<()> {
    if idx == passes.len() {
        let c1 = dist.moment(1);
        let phi_est = match cfg.policy.kind {
            PolicyKind::Kitaev => wrap_angle(theta_kitaev),
            _ => c1.arg(),
        };
        *z += prob * Complex64::from_polar(1.0, phi_est) * c1.conj();
        return Ok(());
    }
    let p = passes[idx];
    let v = cfg.visibility.at(p);
    let theta = match cfg.policy.kind {
        PolicyKind::Kitaev => theta_kitaev,
        PolicyKind::Nonadaptive => idx as f64 * std::f64::consts::PI / resources as f64,
        PolicyKind::Adaptive => {
            if idx == 0 {
                0.0
            } else {
                adaptive_feedback(dist, p, v, &cfg.policy)
            }
        }
    };
    for u in [0u8, 1u8] {
        let pu = dist.marginal(u, p, theta, v);
        if pu <= 0.0 {
            continue;
        }
        let post = dist.bayes_update(u, p, theta, v)?;
        let theta_next = if cfg.policy.kind == PolicyKind::Kitaev && u == 1 {
            theta_kitaev + std::f64::consts::PI / p as f64
        } else {
            theta_kitaev
        };
        walk_branches(cfg, passes, idx + 1, &post, prob * pu, theta_next, resources, z)?;
    }
    Ok(())
}
