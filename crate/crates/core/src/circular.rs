//! Circular probability distributions as finite trigonometric-moment vectors.
//!
//! A density `P(φ)` on `[0, 2π)` is stored as its moments
//! `c_j = ⟨e^{ijφ}⟩` for `j = 0..=D`. Negative indices follow by reflection,
//! `c_{−k} = conj(c_k)`, and are never stored. The measurement likelihoods in
//! this engine are cosine fringes, so every Bayesian update is *exact* in this
//! representation: conditioning on an outcome of a `p`-pass measurement maps
//! degree-`d` trigonometric polynomials to degree-`d+p` ones. A distribution
//! allocated with capacity `D` no smaller than the total passes applied can
//! therefore be updated with zero truncation error.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `2π`.
pub const TAU: f64 = std::f64::consts::TAU;

/// Reduce an angle to `[0, 2π)`.
pub fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs.
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// `+1` for outcome 0, `−1` for outcome 1.
#[inline]
fn outcome_sign(u: u8) -> f64 {
    if u == 0 {
        1.0
    } else {
        -1.0
    }
}

fn check_outcome(u: u8) -> Result<()> {
    if u > 1 {
        return Err(Error::InvalidArgument(format!("outcome bit must be 0 or 1, got {u}")));
    }
    Ok(())
}

fn check_visibility(visibility: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&visibility) {
        return Err(Error::InvalidArgument(format!(
            "visibility must lie in [0, 1], got {visibility}"
        )));
    }
    Ok(())
}

fn check_passes(p: u32) -> Result<()> {
    if p < 1 {
        return Err(Error::InvalidArgument("pass count must be at least 1".into()));
    }
    Ok(())
}

/// Probability of outcome `u` given phase offset `delta = φ − θ`, pass count
/// `p`, and fringe `visibility`:
///
/// `P(u | φ) = [1 + (−1)^u · visibility · cos(p·delta)] / 2`.
///
/// The two outcomes sum to one for every input.
pub fn likelihood(u: u8, delta: f64, p: u32, visibility: f64) -> Result<f64> {
    check_outcome(u)?;
    check_passes(p)?;
    check_visibility(visibility)?;
    Ok(0.5 * (1.0 + outcome_sign(u) * visibility * (p as f64 * delta).cos()))
}

/// A circular probability density in trigonometric-moment form.
///
/// Immutable after construction; updates return new values. Plain data, safe
/// to move across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDistribution {
    /// `c_0..c_D` with `c_0 = 1` exactly.
    moments: Vec<Complex64>,
    /// Total passes applied so far; harmonics above this index are exactly
    /// zero, so reads beyond capacity are legitimate zero-extensions as long
    /// as updates respect the capacity check.
    degree_used: usize,
}

impl PhaseDistribution {
    /// The flat prior on `[0, 2π)` with room for `max_degree` harmonics.
    pub fn uniform(max_degree: usize) -> Result<Self> {
        if max_degree < 1 {
            return Err(Error::InvalidArgument(
                "max_degree must be at least 1".into(),
            ));
        }
        let mut moments = vec![Complex64::ZERO; max_degree + 1];
        moments[0] = Complex64::ONE;
        Ok(Self { moments, degree_used: 0 })
    }

    /// Build a distribution from an explicit moment vector `c_0..c_D`.
    ///
    /// Validates `c_0 = 1` (within 1e−12) and `|c_j| ≤ 1 + 1e−12`; the degree
    /// in use is set to the highest nonzero harmonic.
    pub fn from_moments(moments: Vec<Complex64>) -> Result<Self> {
        if moments.is_empty() {
            return Err(Error::InvalidArgument("moment vector must be non-empty".into()));
        }
        if (moments[0] - Complex64::ONE).norm() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "c_0 must equal 1, got {}",
                moments[0]
            )));
        }
        if let Some((j, c)) = moments
            .iter()
            .enumerate()
            .find(|(_, c)| c.norm() > 1.0 + 1e-12)
        {
            return Err(Error::InvalidArgument(format!(
                "|c_{j}| = {} exceeds 1",
                c.norm()
            )));
        }
        let degree_used = moments
            .iter()
            .rposition(|c| c.norm() > 0.0)
            .unwrap_or(0);
        let mut moments = moments;
        moments[0] = Complex64::ONE;
        Ok(Self { moments, degree_used })
    }

    /// Highest harmonic this distribution can hold.
    pub fn max_degree(&self) -> usize {
        self.moments.len() - 1
    }

    /// Total passes applied so far (highest possibly-nonzero harmonic).
    pub fn degree_used(&self) -> usize {
        self.degree_used
    }

    /// The stored moment vector `c_0..c_D`.
    pub fn moments(&self) -> &[Complex64] {
        &self.moments
    }

    /// Moment `c_j` for any signed index: reflection for `j < 0`,
    /// zero-extension beyond the stored degree.
    pub fn moment(&self, j: i64) -> Complex64 {
        let a = j.unsigned_abs() as usize;
        if a >= self.moments.len() {
            return Complex64::ZERO;
        }
        if j >= 0 {
            self.moments[a]
        } else {
            self.moments[a].conj()
        }
    }

    /// Marginal probability of outcome `u` for a `p`-pass measurement at
    /// feedback phase `theta`:
    ///
    /// `P(u) = ½ [1 + (−1)^u · v · Re(e^{−ipθ} c_p)]`.
    pub fn marginal(&self, u: u8, p: u32, theta: f64, visibility: f64) -> f64 {
        let rot = Complex64::from_polar(1.0, -(p as f64) * theta);
        0.5 * (1.0 + outcome_sign(u) * visibility * (rot * self.moment(p as i64)).re)
    }

    /// Condition on outcome `u` of a `p`-pass measurement at feedback phase
    /// `theta` with the given `visibility`, returning the normalized
    /// posterior.
    ///
    /// In moment space the unnormalized update is
    ///
    /// `c_j' = ½ c_j + (−1)^u (v/4) (e^{−ipθ} c_{j+p} + e^{ipθ} c_{j−p})`,
    ///
    /// followed by division by `c_0'`. Exact (no truncation) whenever the
    /// capacity check passes.
    pub fn bayes_update(&self, u: u8, p: u32, theta: f64, visibility: f64) -> Result<Self> {
        check_outcome(u)?;
        check_passes(p)?;
        check_visibility(visibility)?;
        let d = self.max_degree();
        if self.degree_used + p as usize > d {
            return Err(Error::Capacity {
                degree_used: self.degree_used,
                p,
                max_degree: d,
            });
        }
        let s = outcome_sign(u) * visibility / 4.0;
        let rot = Complex64::from_polar(1.0, -(p as f64) * theta);
        let rot_conj = rot.conj();
        let pi = p as i64;
        // Harmonics above degree_used + p stay exactly zero, so only the
        // low block needs computing; the rest of the buffer is left zeroed.
        let new_deg = self.degree_used + p as usize;
        let mut out = vec![Complex64::ZERO; d + 1];
        for (j, slot) in out.iter_mut().enumerate().take(new_deg + 1) {
            let j = j as i64;
            *slot = 0.5 * self.moment(j)
                + s * (rot * self.moment(j + pi) + rot_conj * self.moment(j - pi));
        }
        let c0 = out[0].re;
        if c0 <= 0.0 {
            return Err(Error::ImpossibleOutcome);
        }
        for c in &mut out[..=new_deg] {
            *c /= c0;
        }
        out[0] = Complex64::ONE;
        Ok(Self {
            moments: out,
            degree_used: new_deg,
        })
    }

    /// `|c_1|`: concentration of the density around its circular mean.
    pub fn sharpness(&self) -> f64 {
        self.moment(1).norm()
    }

    /// Holevo phase variance `sharpness^{−2} − 1`; `+∞` for a flat density.
    pub fn holevo_variance(&self) -> f64 {
        let s = self.sharpness();
        if s == 0.0 {
            f64::INFINITY
        } else {
            (s.powi(-2) - 1.0).max(0.0)
        }
    }

    /// Circular-mean phase estimate `arg(c_1)`, reduced to `[0, 2π)`.
    pub fn estimate(&self) -> Result<f64> {
        if self.sharpness() == 0.0 {
            return Err(Error::UndefinedEstimate);
        }
        Ok(wrap_angle(self.moment(1).arg()))
    }

    /// Evaluate the density at `phi`:
    /// `P(φ) = (1/2π) [1 + 2 Σ_{j≥1} Re(c_j e^{−ijφ})]`.
    pub fn density_at(&self, phi: f64) -> f64 {
        let mut acc = 1.0;
        for (j, c) in self.moments.iter().enumerate().skip(1) {
            acc += 2.0 * (c * Complex64::from_polar(1.0, -(j as f64) * phi)).re;
        }
        acc / TAU
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn uniform_has_unit_mass_and_no_harmonics() {
        let d = PhaseDistribution::uniform(4).unwrap();
        assert_eq!(d.moments().len(), 5);
        assert_eq!(d.moment(0), Complex64::ONE);
        for j in 1..=4 {
            assert_eq!(d.moment(j), Complex64::ZERO);
        }
        let d1 = PhaseDistribution::uniform(1).unwrap();
        assert_eq!(d1.moments(), &[Complex64::ONE, Complex64::ZERO]);
    }

    #[test]
    fn uniform_rejects_zero_degree() {
        assert!(matches!(
            PhaseDistribution::uniform(0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn uniform_has_infinite_holevo_variance() {
        let d = PhaseDistribution::uniform(3).unwrap();
        assert_eq!(d.sharpness(), 0.0);
        assert!(d.holevo_variance().is_infinite());
    }

    #[test]
    fn likelihood_matches_fringe_formula() {
        assert_eq!(likelihood(0, 0.0, 1, 1.0).unwrap(), 1.0);
        assert_eq!(likelihood(1, 0.0, 1, 1.0).unwrap(), 0.0);
        assert!((likelihood(0, 0.0, 32, 0.954).unwrap() - 0.977).abs() < 1e-12);
        for p in [1u32, 2, 8, 32] {
            let half = likelihood(0, PI / (2.0 * p as f64), p, 1.0).unwrap();
            assert!((half - 0.5).abs() < 1e-12, "p={p}: {half}");
        }
    }

    #[test]
    fn likelihood_outcomes_sum_to_one() {
        for &(delta, p, v) in &[(0.3, 1u32, 1.0), (1.7, 8, 0.6), (-2.2, 32, 0.954)] {
            let total = likelihood(0, delta, p, v).unwrap() + likelihood(1, delta, p, v).unwrap();
            assert!((total - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn likelihood_validates_arguments() {
        assert!(likelihood(0, 0.0, 0, 1.0).is_err());
        assert!(likelihood(0, 0.0, 1, 1.5).is_err());
        assert!(likelihood(0, 0.0, 1, -0.1).is_err());
        assert!(likelihood(2, 0.0, 1, 1.0).is_err());
    }

    #[test]
    fn single_update_of_flat_prior_gives_half_moment() {
        let prior = PhaseDistribution::uniform(2).unwrap();
        let post0 = prior.bayes_update(0, 1, 0.0, 1.0).unwrap();
        assert!((post0.moment(1) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((post0.sharpness() - 0.5).abs() < 1e-15);
        assert!((post0.holevo_variance() - 3.0).abs() < 1e-12);
        assert_eq!(post0.estimate().unwrap(), 0.0);

        let post1 = prior.bayes_update(1, 1, 0.0, 1.0).unwrap();
        assert!((post1.moment(1) - Complex64::new(-0.5, 0.0)).norm() < 1e-15);
        assert!((post1.estimate().unwrap() - PI).abs() < 1e-15);
    }

    #[test]
    fn update_is_phase_covariant_in_theta() {
        let prior = PhaseDistribution::uniform(2).unwrap();
        let post = prior.bayes_update(0, 1, 1.2, 1.0).unwrap();
        assert!((post.estimate().unwrap() - 1.2).abs() < 1e-12);
        assert!((post.sharpness() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_visibility_update_is_identity() {
        let prior = PhaseDistribution::uniform(4)
            .unwrap()
            .bayes_update(0, 1, 0.7, 1.0)
            .unwrap();
        let post = prior.bayes_update(1, 2, 2.1, 0.0).unwrap();
        for j in 0..=4 {
            assert!((post.moment(j) - prior.moment(j)).norm() < 1e-15);
        }
    }

    #[test]
    fn law_of_total_probability_recovers_prior() {
        let prior = PhaseDistribution::uniform(8)
            .unwrap()
            .bayes_update(0, 2, 0.9, 0.8)
            .unwrap()
            .bayes_update(1, 1, 2.3, 0.95)
            .unwrap();
        let (p, theta, v) = (2u32, 0.4, 0.7);
        let m0 = prior.marginal(0, p, theta, v);
        let m1 = prior.marginal(1, p, theta, v);
        assert!((m0 + m1 - 1.0).abs() < 1e-12);
        let post0 = prior.bayes_update(0, p, theta, v).unwrap();
        let post1 = prior.bayes_update(1, p, theta, v).unwrap();
        for j in 0..=8 {
            let mixed = m0 * post0.moment(j) + m1 * post1.moment(j);
            assert!(
                (mixed - prior.moment(j)).norm() < 1e-12,
                "moment {j} not recovered"
            );
        }
    }

    #[test]
    fn capacity_is_enforced() {
        let d = PhaseDistribution::uniform(2)
            .unwrap()
            .bayes_update(0, 1, 0.0, 1.0)
            .unwrap()
            .bayes_update(0, 1, 0.5, 1.0)
            .unwrap();
        assert_eq!(d.degree_used(), 2);
        assert!(matches!(
            d.bayes_update(0, 1, 1.0, 1.0),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn impossible_outcome_is_detected() {
        // Point mass at φ = π: c_j = (−1)^j. Outcome 0 at θ = 0, v = 1 has
        // probability zero there. Capacity headroom so the zero-probability
        // branch is what trips.
        let point = PhaseDistribution::from_moments(vec![
            Complex64::ONE,
            Complex64::new(-1.0, 0.0),
            Complex64::ONE,
            Complex64::ZERO,
        ])
        .unwrap();
        assert!(matches!(
            point.bayes_update(0, 1, 0.0, 1.0),
            Err(Error::ImpossibleOutcome)
        ));
    }

    #[test]
    fn point_mass_has_unit_sharpness() {
        let phi0 = 0.7;
        let moments: Vec<Complex64> = (0..=3)
            .map(|j| Complex64::from_polar(1.0, j as f64 * phi0))
            .collect();
        let d = PhaseDistribution::from_moments(moments).unwrap();
        assert!((d.sharpness() - 1.0).abs() < 1e-15);
        assert!(d.holevo_variance().abs() < 1e-12);
        assert!((d.estimate().unwrap() - phi0).abs() < 1e-12);
    }

    #[test]
    fn from_moments_validates() {
        assert!(PhaseDistribution::from_moments(vec![]).is_err());
        assert!(PhaseDistribution::from_moments(vec![Complex64::new(0.9, 0.0)]).is_err());
        assert!(PhaseDistribution::from_moments(vec![
            Complex64::ONE,
            Complex64::new(1.5, 0.0)
        ])
        .is_err());
    }

    #[test]
    fn estimate_requires_nonzero_sharpness() {
        let d = PhaseDistribution::uniform(2).unwrap();
        assert!(matches!(d.estimate(), Err(Error::UndefinedEstimate)));
    }

    #[test]
    fn density_matches_posterior_formula() {
        // One u=0, p=1, θ=0 update of the flat prior: P(φ) = (1 + cos φ)/2π.
        let d = PhaseDistribution::uniform(2)
            .unwrap()
            .bayes_update(0, 1, 0.0, 1.0)
            .unwrap();
        for &phi in &[0.0, 0.5, PI, 4.0] {
            let expect = (1.0 + phi.cos()) / TAU;
            assert!((d.density_at(phi) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn wrap_angle_hits_range() {
        assert_eq!(wrap_angle(0.0), 0.0);
        assert!((wrap_angle(-1.0) - (TAU - 1.0)).abs() < 1e-15);
        assert!((wrap_angle(3.0 * TAU + 0.25) - 0.25).abs() < 1e-12);
        let w = wrap_angle(-1e-300);
        assert!((0.0..TAU).contains(&w));
    }
}
