use rand::Rng;
use rand_distr::StandardNormal;

use super::{DetectorModel, GaussianTwoModeState};
use crate::{rng, Error, Result};

/// Draws simultaneous homodyne outcomes `(q_a, q_b)` from a two-mode state
/// seen through a [`DetectorModel`] on each arm.
///
/// Per draw, in this fixed order: phase jitter for a and b (only when the
/// jitter is nonzero), two normals for the projected bivariate Gaussian, one
/// normal per arm for vacuum admixture plus dark noise.
#[derive(Debug, Clone, Copy)]
pub struct HomodyneSampler {
    state: GaussianTwoModeState,
    detector: DetectorModel,
    signal_gain: f64,
    noise_std: f64,
}

impl HomodyneSampler {
    pub fn new(state: &GaussianTwoModeState, detector: &DetectorModel) -> Result<Self> {
        let state = GaussianTwoModeState::new(state.mean, state.cov)?;
        detector.validate()?;
        let eta = detector.efficiency;
        Ok(Self {
            state,
            detector: *detector,
            signal_gain: eta.sqrt(),
            noise_std: (1.0 - eta + detector.dark_variance()).sqrt(),
        })
    }

    pub fn state(&self) -> &GaussianTwoModeState {
        &self.state
    }

    pub fn detector(&self) -> &DetectorModel {
        &self.detector
    }

    pub fn draw<R: Rng + ?Sized>(&self, mut theta_a: f64, mut theta_b: f64, rng: &mut R) -> (f64, f64) {
        let jitter = self.detector.phase_jitter_rad;
        if jitter > 0.0 {
            theta_a += jitter * rng.sample::<f64, _>(StandardNormal);
            theta_b += jitter * rng.sample::<f64, _>(StandardNormal);
        }
        let m = self.state.quadrature_moments(theta_a, theta_b);
        let l11 = m.var_a.max(0.0).sqrt();
        let l21 = if l11 > 0.0 { m.cov_ab / l11 } else { 0.0 };
        let l22 = (m.var_b - l21 * l21).max(0.0).sqrt();
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        let qa = m.mean_a + l11 * z1;
        let qb = m.mean_b + l21 * z1 + l22 * z2;
        let na: f64 = rng.sample(StandardNormal);
        let nb: f64 = rng.sample(StandardNormal);
        (self.signal_gain * qa + self.noise_std * na, self.signal_gain * qb + self.noise_std * nb)
    }
}

/// `count` joint samples at fixed local-oscillator phases. Bit-exact for a
/// given `(seed, count)` whatever the size of the rayon pool.
pub fn sample_joint_quadratures(
    state: &GaussianTwoModeState,
    theta_a: f64,
    theta_b: f64,
    detector: &DetectorModel,
    seed: u64,
    count: usize,
) -> Result<Vec<(f64, f64)>> {
    if count == 0 {
        return Err(Error::invalid("count", "must be at least 1"));
    }
    let sampler = HomodyneSampler::new(state, detector)?;
    Ok(rng::generate(seed, 0, count, |r, _| sampler.draw(theta_a, theta_b, r)))
}
