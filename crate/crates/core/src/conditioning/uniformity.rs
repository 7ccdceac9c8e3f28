//! Homogeneity of per-`θ_a` histograms.
//!
//! Under the null hypothesis every segment draws i.i.d. `(q_a, w)` pairs
//! from one distribution, so the bin sum `S_sj = Σ w·1[q_a ∈ j]` of segment
//! `s` has mean `N_s·μ_j` and second moment `N_s·m_j` with `μ_j = E[w·1_j]`
//! and `m_j = E[w²·1_j]`. The statistic `Σ_sj (S_sj − N_s μ̂_j)² / (N_s m̂_j)`
//! has expectation `(S−1)·Σ_j (1 − μ_j²/m_j)`, which we use as the degrees
//! of freedom of a chi-square reference. With unit weights this is exactly
//! Pearson's homogeneity test with `(S−1)(J−1)` degrees of freedom.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::WeightedHistogram;
use crate::{Error, Result};

/// Bins whose pooled raw count is below this many per segment are skipped.
const MIN_COUNT_PER_SEGMENT: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightSource {
    /// Heralding weights `q_b² − c` (conditioned densities).
    Conditioned,
    /// Unit weights (plain quadrature histograms).
    Counts,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniformityReport {
    pub segments: usize,
    pub bins_used: usize,
    /// Largest sup-norm distance between two normalized segment densities.
    pub max_distance: f64,
    pub statistic: f64,
    pub dof: f64,
    pub p_value: f64,
}

impl UniformityReport {
    pub fn passes(&self, alpha: f64) -> bool {
        self.p_value >= alpha
    }

    pub fn to_text(&self) -> String {
        format!(
            "# twinbeam uniformity report\nsegments = {}\nbins_used = {}\nmax_distance = {}\nstatistic = {}\ndof = {}\np_value = {}\npasses_1pct = {}\n",
            self.segments,
            self.bins_used,
            self.max_distance,
            self.statistic,
            self.dof,
            self.p_value,
            self.passes(0.01)
        )
    }
}

pub fn uniformity_test(histograms: &[WeightedHistogram], source: WeightSource) -> Result<UniformityReport> {
    if histograms.len() < 2 {
        return Err(Error::InsufficientStatistics(format!("{} segment(s), need at least 2", histograms.len())));
    }
    let binning = *histograms[0].binning();
    if let Some(h) = histograms.iter().find(|h| *h.binning() != binning) {
        return Err(Error::BinningMismatch(format!("{:?} vs {:?}", binning, h.binning())));
    }

    let sums = |h: &WeightedHistogram, j: usize| -> (f64, f64) {
        match source {
            WeightSource::Conditioned => (h.weight_sums()[j], h.weight_sq_sums()[j]),
            WeightSource::Counts => (h.raw_counts()[j] as f64, h.raw_counts()[j] as f64),
        }
    };
    let seen: Vec<f64> = histograms.iter().map(|h| h.records_seen() as f64).collect();
    let total_seen: f64 = seen.iter().sum();
    let s = histograms.len() as f64;

    let (mut statistic, mut concentration, mut bins_used) = (0.0, 0.0, 0usize);
    for j in 0..binning.bins {
        let pooled_count: u64 = histograms.iter().map(|h| h.raw_counts()[j]).sum();
        if (pooled_count as f64) < MIN_COUNT_PER_SEGMENT * s {
            continue;
        }
        let (first, second) = histograms.iter().fold((0.0, 0.0), |acc, h| {
            let (a, b) = sums(h, j);
            (acc.0 + a, acc.1 + b)
        });
        let mu = first / total_seen;
        let m2 = second / total_seen;
        if m2 <= 0.0 {
            continue;
        }
        bins_used += 1;
        concentration += mu * mu / m2;
        for (h, &n) in histograms.iter().zip(&seen) {
            let dev = sums(h, j).0 - n * mu;
            statistic += dev * dev / (n * m2);
        }
    }
    let dof = (s - 1.0) * (bins_used as f64 - concentration);
    if dof <= 0.0 {
        return Err(Error::InsufficientStatistics("no populated bins to compare".into()));
    }
    let p_value = ChiSquared::new(dof).map(|c| c.sf(statistic)).unwrap_or(f64::NAN);

    let densities: Vec<Vec<f64>> = histograms
        .iter()
        .map(|h| match source {
            WeightSource::Conditioned => h.density_unchecked().values,
            WeightSource::Counts => h.normalize_counts().map(|d| d.values).unwrap_or_default(),
        })
        .collect();
    let mut max_distance: f64 = 0.0;
    for a in 0..densities.len() {
        for b in a + 1..densities.len() {
            let d = densities[a]
                .iter()
                .zip(&densities[b])
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, |m: f64, v| if v.is_nan() { f64::INFINITY } else { m.max(v) });
            max_distance = max_distance.max(d);
        }
    }

    Ok(UniformityReport { segments: histograms.len(), bins_used, max_distance, statistic, dof, p_value })
}
