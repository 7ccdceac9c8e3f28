//! Exact conditioned photon statistics in a truncated Fock basis.
//!
//! The two-mode squeezed vacuum has amplitudes `c_n = (−tanh r)ⁿ / cosh r`
//! on `|n⟩_a|n⟩_b`. Both homodyne arms lose photons through attenuation
//! channels; additive detector noise of variance `V` on arm `a` is the
//! composition of a further attenuation by `1/G` and a quantum-limited
//! amplifier of gain `G = 1 + V/2`, which reproduces `V ↦ ηV + 1 − η + V`
//! exactly. Averaged over the conditioning phase, the weight `q_b² − c` has
//! expectation `2η_b n + 1 + V_dark − c` given `n` pairs, so the
//! conditioned diagonal is `p(k) ∝ Σ_n |c_n|² w_n T_a(k | n)`.

use statrs::function::factorial::binomial;

use super::loss::survival_probability;
use super::FockDiagonal;
use crate::{Error, Result};

/// Largest tolerated norm deficit of a truncated state.
pub const TRUNCATION_TOLERANCE: f64 = 1e-8;
const INTERNAL_TAIL: f64 = 1e-20;
const MAX_INTERNAL_ORDER: usize = 2000;

/// Truncated two-mode squeezed vacuum.
#[derive(Debug, Clone, PartialEq)]
pub struct FockStateVectorTwoMode {
    amplitudes: Vec<f64>,
}

impl FockStateVectorTwoMode {
    /// Amplitudes for `n = 0..=n_max`; fails the truncation audit when the
    /// discarded norm reaches [`TRUNCATION_TOLERANCE`].
    pub fn tmss(r: f64, n_max: usize) -> Result<Self> {
        let state = Self::tmss_unchecked(r, n_max)?;
        let eps = state.norm_deficit();
        if eps >= TRUNCATION_TOLERANCE {
            return Err(Error::Truncation(format!(
                "n_max = {n_max} discards {eps:.3e} of the norm at r = {r}"
            )));
        }
        Ok(state)
    }

    /// Smallest truncation that passes the audit at `tolerance`.
    pub fn tmss_auto(r: f64, tolerance: f64) -> Result<Self> {
        let lambda2 = r.tanh().powi(2);
        // Σ_{n>N} |c_n|² = λ^(2(N+1))
        let n_max = if lambda2 == 0.0 {
            0
        } else {
            ((tolerance.ln() / lambda2.ln()).ceil() as usize).saturating_sub(1)
        };
        if n_max > MAX_INTERNAL_ORDER {
            return Err(Error::Truncation(format!("r = {r} needs more than {MAX_INTERNAL_ORDER} photons")));
        }
        Self::tmss_unchecked(r, n_max)
    }

    fn tmss_unchecked(r: f64, n_max: usize) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::invalid("r", "must be finite and non-negative"));
        }
        let lambda = -r.tanh();
        let c0 = 1.0 / r.cosh();
        Ok(Self { amplitudes: (0..=n_max).map(|n| c0 * lambda.powi(n as i32)).collect() })
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn n_max(&self) -> usize {
        self.amplitudes.len() - 1
    }

    /// `1 − Σ|c_n|²`.
    pub fn norm_deficit(&self) -> f64 {
        (1.0 - self.amplitudes.iter().map(|c| c * c).sum::<f64>()).max(0.0)
    }

    /// Probability of exactly `n` photons in each mode.
    pub fn pair_probability(&self, n: usize) -> f64 {
        self.amplitudes.get(n).map_or(0.0, |c| c * c)
    }
}

/// `r` maximizing the single-pair probability `sinh²r / cosh⁴r`.
pub fn optimal_pair_squeezing() -> f64 {
    2.0f64.sqrt().acosh()
}

/// `|⟨n − k| A_k |n⟩|` for the attenuation channel with transmission `η`.
pub fn attenuation_kraus_element(k: usize, n: usize, eta: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    survival_probability(n - k, n, eta).sqrt()
}

/// `P(k | m)` for a quantum-limited phase-insensitive amplifier of gain `G ≥ 1`.
pub fn amplifier_transition(k: usize, m: usize, gain: f64) -> f64 {
    if k < m {
        return 0.0;
    }
    if gain == 1.0 {
        return if k == m { 1.0 } else { 0.0 };
    }
    binomial(k as u64, m as u64) * gain.powi(-(m as i32 + 1)) * (1.0 - 1.0 / gain).powi((k - m) as i32)
}

/// Parameters of the heralding experiment seen by the oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleParams {
    pub r: f64,
    pub eta_a: f64,
    pub eta_b: f64,
    /// Detector noise variance in vacuum units, the same on both arms.
    pub dark_variance: f64,
    /// Constant `c` subtracted in the weight `q_b² − c`.
    pub calibration: f64,
}

impl OracleParams {
    pub fn ideal(r: f64) -> Self {
        Self { r, eta_a: 1.0, eta_b: 1.0, dark_variance: 0.0, calibration: 1.0 }
    }

    fn validate(&self) -> Result<()> {
        for (name, eta) in [("eta_a", self.eta_a), ("eta_b", self.eta_b)] {
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(Error::invalid(name, format!("{eta} is outside (0, 1]")));
            }
        }
        if !(self.dark_variance >= 0.0 && self.dark_variance.is_finite()) {
            return Err(Error::invalid("dark_variance", "must be finite and non-negative"));
        }
        Ok(())
    }

    /// Expected heralding weight given `n` photons in mode `b`.
    pub fn weight(&self, n: usize) -> f64 {
        2.0 * self.eta_b * n as f64 + 1.0 + self.dark_variance - self.calibration
    }
}

/// Exact ensemble limit of the weighted-histogram diagonal, truncated to `n_max`.
pub fn oracle_conditioned_state(params: &OracleParams, n_max: usize) -> Result<FockDiagonal> {
    params.validate()?;
    let state = FockStateVectorTwoMode::tmss_auto(params.r, INTERNAL_TAIL)?;
    let gain = 1.0 + 0.5 * params.dark_variance;
    let eta_loss = params.eta_a / gain;

    // Weighted photon distribution of mode a before detection.
    let source: Vec<f64> = (0..=state.n_max()).map(|n| state.pair_probability(n) * params.weight(n)).collect();
    let total: f64 = source.iter().sum();
    if total == 0.0 || !total.is_finite() {
        return Err(Error::DegenerateConditioning("expected heralding weight vanishes".into()));
    }
    let lossy: Vec<f64> = (0..source.len())
        .map(|m| (m..source.len()).map(|n| survival_probability(m, n, eta_loss) * source[n]).sum())
        .collect();

    let mut out = vec![0.0; n_max + 1];
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = (0..=k.min(lossy.len() - 1)).map(|m| amplifier_transition(k, m, gain) * lossy[m]).sum::<f64>() / total;
    }
    Ok(FockDiagonal::new(out))
}

/// `E[q_b² − c | q_a]` at `θ_a = 0`, averaged over `θ_b`, for the ideal
/// two-mode squeezed vacuum, computed in the Fock basis.
pub fn conditional_mean_weight(r: f64, q_a: f64, calibration: f64) -> Result<f64> {
    let state = FockStateVectorTwoMode::tmss_auto(r, INTERNAL_TAIL)?;
    let psi = super::fock::wavefunctions(state.n_max(), q_a);
    let (mut num, mut den) = (0.0, 0.0);
    for (n, p) in psi.iter().enumerate() {
        let w = state.pair_probability(n) * p * p;
        num += w * (2.0 * n as f64 + 1.0 - calibration);
        den += w;
    }
    Ok(num / den)
}
