//! Feedback policies: how the feedback phase θ is chosen before each photon.
//!
//! Three rules are implemented:
//!
//! * **Kitaev digit feedback** — after each outcome `u` of a `p`-pass
//!   measurement, shift θ by `u·π/p`. After the final single-pass photon the
//!   accumulated θ (mod 2π) *is* the estimate. Valid for one photon per stage
//!   (`M = 1`).
//! * **Bayesian-adaptive** — before each photon, choose θ to maximize the
//!   expected posterior sharpness at the harmonic the photon probes (see
//!   [`adaptive_feedback`]). Reduces to Kitaev digit feedback at `M = 1` and
//!   realizes the optimal multi-photon generalization for `M > 1`.
//! * **Nonadaptive sweep** — photon `j` of `N` uses `θ_init + j·π/N`,
//!   independent of outcomes.

use num_complex::Complex64;

use crate::circular::{PhaseDistribution, TAU};
use crate::error::{Error, Result};

/// Which feedback rule a trial runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    /// Digit-by-digit feedback, one photon per stage.
    Kitaev,
    /// Bayesian posterior optimization of θ before every photon.
    Adaptive,
    /// Deterministic π/N increments, single-pass photons only.
    Nonadaptive,
}

impl std::fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PolicyKind::Kitaev => "kitaev",
            PolicyKind::Adaptive => "adaptive",
            PolicyKind::Nonadaptive => "nonadaptive",
        })
    }
}

impl std::str::FromStr for PolicyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kitaev" => Ok(PolicyKind::Kitaev),
            "adaptive" => Ok(PolicyKind::Adaptive),
            "nonadaptive" => Ok(PolicyKind::Nonadaptive),
            other => Err(Error::InvalidArgument(format!("unknown policy: {other}"))),
        }
    }
}

/// The quantity the adaptive optimizer extremizes over θ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdaptiveObjective {
    /// Maximize the expected unnormalized posterior sharpness
    /// `Σ_u |c_h'(u, θ)|` at the probed harmonic `h = p`. Default.
    #[default]
    ExpectedSharpness,
    /// Minimize the expected posterior Holevo variance at the probed
    /// harmonic, `Σ_u P(u)·[(c_0'/|c_h'|)² − 1]`. Alternative reading of the
    /// same one-step-lookahead idea; kept for comparison studies.
    ExpectedVariance,
}

/// Feedback rule plus the adaptive optimizer's parameters.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    /// Coarse-grid resolution per period of the adaptive objective (≥ 8).
    pub grid_points: u32,
    /// Golden-section refinement steps after the grid search (≥ 0).
    pub refine_iters: u32,
    /// Which objective the adaptive optimizer uses.
    pub objective: AdaptiveObjective,
}

impl PolicySpec {
    pub const DEFAULT_GRID_POINTS: u32 = 64;
    pub const DEFAULT_REFINE_ITERS: u32 = 40;

    pub fn kitaev() -> Self {
        Self::of_kind(PolicyKind::Kitaev)
    }

    pub fn adaptive() -> Self {
        Self::of_kind(PolicyKind::Adaptive)
    }

    pub fn nonadaptive() -> Self {
        Self::of_kind(PolicyKind::Nonadaptive)
    }

    pub fn of_kind(kind: PolicyKind) -> Self {
        Self {
            kind,
            grid_points: Self::DEFAULT_GRID_POINTS,
            refine_iters: Self::DEFAULT_REFINE_ITERS,
            objective: AdaptiveObjective::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind == PolicyKind::Adaptive && self.grid_points < 8 {
            return Err(Error::InvalidArgument(format!(
                "adaptive policy needs grid_points >= 8, got {}",
                self.grid_points
            )));
        }
        Ok(())
    }
}

/// Per-trial feedback bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeedbackState {
    /// Current feedback phase θ (raw real; reduced only at API boundaries).
    pub theta: f64,
    /// The random initial phase, drawn once per trial.
    pub theta_init: f64,
    /// 0-based count of photons consumed so far.
    pub photon_index: u64,
}

impl FeedbackState {
    pub fn new(theta_init: f64) -> Self {
        Self {
            theta: theta_init,
            theta_init,
            photon_index: 0,
        }
    }
}

/// Kitaev digit rule: shift θ by `u·π/p` after a `p`-pass outcome `u`.
pub fn kitaev_feedback(state: &FeedbackState, u: u8, p: u32) -> FeedbackState {
    let shift = if u == 1 {
        std::f64::consts::PI / p as f64
    } else {
        0.0
    };
    FeedbackState {
        theta: state.theta + shift,
        theta_init: state.theta_init,
        photon_index: state.photon_index + 1,
    }
}

/// Nonadaptive sweep: photon `j` (0-based) of a run with `n` total resources
/// measures at `θ_init + j·π/n`.
pub fn nonadaptive_feedback(state: &FeedbackState, n: u64) -> f64 {
    state.theta_init + state.photon_index as f64 * std::f64::consts::PI / n as f64
}

/// The adaptive objective evaluated at a candidate feedback phase `theta`,
/// for a `p`-pass photon against the current posterior.
///
/// Both objectives act on the harmonic the photon probes, `h = p`: a `p`-pass
/// photon interferes `e^{ipφ}` against `e^{ipθ}`, so the posterior moments it
/// can move are those coupled to `c_p`. The unnormalized posterior moment at
/// `h` is `c_h'(u, θ) = A + (−1)^u B(θ)` with
///
/// `A = ½ c_h`, `B(θ) = (v/4)(e^{−ipθ} c_{h+p} + e^{ipθ} c_{h−p})`,
///
/// so the expected-sharpness objective has the closed form
/// `|A + B(θ)| + |A − B(θ)|`. At `p = 1` this is exactly the familiar
/// first-moment expected sharpness `Σ_u |c_1'(u, θ)|`; for `p > 1` it keeps
/// the optimizer informative at multipass stages, where `c_1` and its
/// neighbors are still identically zero and would leave θ unconstrained.
///
/// The objective is periodic in θ with period `2π/p`. Larger is better for
/// both variants (the expected-variance form is returned negated).
pub fn feedback_objective(
    dist: &PhaseDistribution,
    p: u32,
    visibility: f64,
    objective: AdaptiveObjective,
    theta: f64,
) -> f64 {
    let h = p as i64;
    let a = 0.5 * dist.moment(h);
    let up = dist.moment(h + p as i64);
    let dn = dist.moment(h - p as i64);
    let rot = Complex64::from_polar(1.0, -(p as f64) * theta);
    let b = (visibility / 4.0) * (rot * up + rot.conj() * dn);
    match objective {
        AdaptiveObjective::ExpectedSharpness => (a + b).norm() + (a - b).norm(),
        AdaptiveObjective::ExpectedVariance => {
            // Σ_u P(u)·V_h(posterior_u) = Σ_u c_0'(u)³ / |c_h'(u)|² − 1;
            // return the negated Σ (constant dropped) so larger is better.
            let cp = dist.moment(p as i64);
            let mut total = 0.0;
            for sign in [1.0, -1.0] {
                let c0 = 0.5 * (1.0 + sign * visibility * (rot * cp).re);
                if c0 <= 0.0 {
                    continue;
                }
                let ch = a + sign * b;
                let n2 = ch.norm_sqr();
                if n2 == 0.0 {
                    return f64::NEG_INFINITY;
                }
                total += c0 * c0 * c0 / n2;
            }
            -total
        }
    }
}

/// Choose the feedback phase for the next `p`-pass photon by maximizing the
/// configured objective over one period `[0, 2π/p)`.
///
/// Optimization is a `grid_points`-sample scan of one period followed by
/// `refine_iters` golden-section steps bracketing the best sample. Grid ties
/// keep the lowest θ, and values within a relative 1e−12 count as tied, so
/// plateaus — exact ones (flat prior, zero visibility) and the
/// floating-point kind produced by symmetric posteriors with several
/// equivalent maximizers — deterministically resolve to the lowest
/// candidate rather than to whichever maximizer rounding noise favors.
/// The refined point is returned only if it beats the best grid sample by
/// more than the same margin.
pub fn adaptive_feedback(
    dist: &PhaseDistribution,
    p: u32,
    visibility: f64,
    spec: &PolicySpec,
) -> f64 {
    let eval = |theta: f64| feedback_objective(dist, p, visibility, spec.objective, theta);
    let improves = |f: f64, best: f64| {
        if best.is_finite() {
            f > best + 1e-12 * best.abs().max(1.0)
        } else {
            f > best
        }
    };
    let period = TAU / p as f64;
    let grid = spec.grid_points.max(1);
    let step = period / grid as f64;

    let mut best_i = 0u32;
    let mut best_f = eval(0.0);
    for i in 1..grid {
        let f = eval(i as f64 * step);
        if improves(f, best_f) {
            best_f = f;
            best_i = i;
        }
    }
    let theta_grid = best_i as f64 * step;
    if spec.refine_iters == 0 {
        return theta_grid;
    }

    // Golden-section ascent on [θ_grid − step, θ_grid + step].
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut lo = theta_grid - step;
    let mut hi = theta_grid + step;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    for _ in 0..spec.refine_iters {
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = eval(x2);
        }
    }
    let (x_ref, f_ref) = if f1 > f2 { (x1, f1) } else { (x2, f2) };
    if improves(f_ref, best_f) {
        let r = x_ref.rem_euclid(period);
        if r >= period {
            0.0
        } else {
            r
        }
    } else {
        theta_grid
    }
}
