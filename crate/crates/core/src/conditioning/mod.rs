//! Heralding without a photon counter.
//!
//! Each `q_a` sample enters its histogram bin with weight `q_b² − c`
//! instead of 1. Averaged over a uniform sweep of `θ_b`, `⟨Q_b² − 1⟩ =
//! 2⟨n̂_b⟩`, so the weighted histogram is `p(q_a)` multiplied by the mean
//! photon number of `b` conditioned on `q_a`. For weak two-mode squeezing
//! this is, up to normalization, the quadrature density of mode `a` heralded
//! by a single photon in `b`.

mod histogram;
mod uniformity;

pub use histogram::{Binning, QuadratureDensity, WeightedHistogram};
pub use uniformity::{uniformity_test, UniformityReport, WeightSource};

use crate::acquisition::QuadratureRecord;
use crate::{Error, Result};

/// Constant subtracted from `q_b²` in [`weight`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Calibration {
    /// Vacuum variance of the quadrature convention, exactly 1.
    #[default]
    Unit,
    /// Measured `⟨q_b²⟩` of a vacuum calibration run (includes dark noise).
    Measured(f64),
}

impl Calibration {
    pub fn constant(&self) -> f64 {
        match *self {
            Calibration::Unit => 1.0,
            Calibration::Measured(c) => c,
        }
    }

    /// Calibrates from `q_b` samples taken with the signal blocked.
    pub fn measure<I: IntoIterator<Item = f64>>(vacuum_q_b: I) -> Result<Self> {
        let (mut n, mut sum) = (0usize, 0.0);
        for q in vacuum_q_b {
            n += 1;
            sum += q * q;
        }
        if n == 0 {
            return Err(Error::InsufficientStatistics("empty calibration run".into()));
        }
        Ok(Calibration::Measured(sum / n as f64))
    }
}

/// Heralding weight of one conditioning-arm outcome, `q_b² − c`.
pub fn weight(q_b: f64, calibration: Calibration) -> f64 {
    q_b * q_b - calibration.constant()
}

/// Splits a record stream into one histogram per constant-`θ_a` segment,
/// in stream order.
pub fn accumulate_segments<I>(records: I, binning: Binning, calibration: Calibration) -> Vec<WeightedHistogram>
where
    I: IntoIterator<Item = QuadratureRecord>,
{
    let mut out: Vec<WeightedHistogram> = Vec::new();
    for r in records {
        let start_new = out.last().is_none_or(|h| h.theta_a() != Some(r.theta_a));
        if start_new {
            out.push(WeightedHistogram::new(binning, Some(r.theta_a)));
        }
        out.last_mut().expect("segment exists").add(r.q_a, weight(r.q_b, calibration));
    }
    out
}

/// Merges histograms in slice order.
pub fn pooled(histograms: &[WeightedHistogram]) -> Result<WeightedHistogram> {
    let first = histograms.first().ok_or_else(|| Error::IncompleteData("no histograms to pool".into()))?;
    let mut acc = WeightedHistogram::new(*first.binning(), None);
    for h in histograms {
        acc.merge(h)?;
    }
    Ok(acc)
}
