//! Phase-scanning acquisition protocol and record streams.
//!
//! Mode `a` is analysed at a slowly stepped phase `θ_a` that is constant over
//! one histogram segment; the conditioning mode `b` is swept over a full
//! `2π` an integer number of times inside every segment, so each segment sees
//! all projections of `b` equally often.

mod io;

pub use io::{read_records, write_records, RecordFormat, RecordReader, RecordWriter};

use std::f64::consts::{FRAC_PI_2, TAU};

use crate::gaussian::{DetectorModel, GaussianTwoModeState, HomodyneSampler};
use crate::rng::{self, CHUNK_LEN};
use crate::{Error, Result};

/// One simultaneous pair of homodyne outcomes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureRecord {
    pub index: u64,
    pub theta_a: f64,
    pub theta_b: f64,
    pub q_a: f64,
    pub q_b: f64,
}

/// Maps a record index to its pair of local-oscillator phases.
pub trait Schedule: Send + Sync {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(θ_a, θ_b)` of record `index`.
    fn setting(&self, index: usize) -> (f64, f64);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPlan {
    pub histogram_count: usize,
    pub samples_per_histogram: usize,
    pub theta_b_periods_per_histogram: usize,
    /// Total span of the slow `θ_a` scan.
    pub theta_a_range: f64,
}

impl Default for ScanPlan {
    fn default() -> Self {
        Self {
            histogram_count: 36,
            samples_per_histogram: 100_000,
            theta_b_periods_per_histogram: 10,
            theta_a_range: 3.0 * TAU,
        }
    }
}

impl ScanPlan {
    pub fn new(
        histogram_count: usize,
        samples_per_histogram: usize,
        theta_b_periods_per_histogram: usize,
        theta_a_range: f64,
    ) -> Result<Self> {
        let plan = Self { histogram_count, samples_per_histogram, theta_b_periods_per_histogram, theta_a_range };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.histogram_count == 0 {
            return Err(Error::invalid("histogram_count", "must be at least 1"));
        }
        if self.samples_per_histogram == 0 {
            return Err(Error::invalid("samples_per_histogram", "must be at least 1"));
        }
        if self.theta_b_periods_per_histogram == 0 {
            return Err(Error::invalid("theta_b_periods_per_histogram", "must be at least 1"));
        }
        if !self.samples_per_histogram.is_multiple_of(self.theta_b_periods_per_histogram) {
            return Err(Error::invalid(
                "samples_per_histogram",
                format!(
                    "{} is not an integer multiple of the {} θ_b scan periods",
                    self.samples_per_histogram, self.theta_b_periods_per_histogram
                ),
            ));
        }
        if !(self.theta_a_range > 0.0 && self.theta_a_range.is_finite()) {
            return Err(Error::invalid("theta_a_range", "must be positive and finite"));
        }
        if self.theta_a_range <= TAU {
            log::warn!("θ_a scan span {} does not exceed 2π", self.theta_a_range);
        }
        Ok(())
    }

    pub fn samples_per_period(&self) -> usize {
        self.samples_per_histogram / self.theta_b_periods_per_histogram
    }

    /// `θ_a` of segment `s`: `s · range / count`.
    pub fn theta_a(&self, segment: usize) -> f64 {
        segment as f64 * self.theta_a_range / self.histogram_count as f64
    }

    pub fn segment_of(&self, index: usize) -> usize {
        index / self.samples_per_histogram
    }

    /// The full sequence of `(θ_a, θ_b)` settings.
    pub fn generate_scan(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.len()).map(|i| self.setting(i))
    }
}

impl Schedule for ScanPlan {
    fn len(&self) -> usize {
        self.histogram_count * self.samples_per_histogram
    }

    fn setting(&self, index: usize) -> (f64, f64) {
        let period = self.samples_per_period();
        let within = index % self.samples_per_histogram;
        let theta_b = TAU * (within % period) as f64 / period as f64;
        (self.theta_a(self.segment_of(index)), theta_b)
    }
}

/// Blocks of records at fixed, locked phase settings.
#[derive(Debug, Clone, PartialEq)]
pub struct LockedSettings {
    pub settings: Vec<(f64, f64)>,
    pub samples_per_setting: usize,
}

impl LockedSettings {
    /// `(X, X)` then `(P, P)`: what the criteria need.
    pub fn criteria(samples_per_setting: usize) -> Self {
        Self { settings: vec![(0.0, 0.0), (FRAC_PI_2, FRAC_PI_2)], samples_per_setting }
    }
}

impl Schedule for LockedSettings {
    fn len(&self) -> usize {
        self.settings.len() * self.samples_per_setting
    }

    fn setting(&self, index: usize) -> (f64, f64) {
        self.settings[index / self.samples_per_setting]
    }
}

/// Records in chunk-aligned batches this large are generated in parallel.
const BATCH_CHUNKS: usize = 32;

/// Lazily generated record stream. Memory use is bounded by one batch of
/// `BATCH_CHUNKS · CHUNK_LEN` records regardless of the run length.
pub struct RecordStream<S> {
    sampler: HomodyneSampler,
    schedule: S,
    seed: u64,
    next: usize,
    buffer: std::vec::IntoIter<QuadratureRecord>,
}

impl<S: Schedule> RecordStream<S> {
    pub fn total(&self) -> usize {
        self.schedule.len()
    }

    fn refill(&mut self) -> bool {
        let total = self.schedule.len();
        if self.next >= total {
            return false;
        }
        let count = (BATCH_CHUNKS * CHUNK_LEN).min(total - self.next);
        let (sampler, schedule) = (&self.sampler, &self.schedule);
        let batch = rng::generate(self.seed, self.next, count, |r, i| {
            let (theta_a, theta_b) = schedule.setting(i);
            let (q_a, q_b) = sampler.draw(theta_a, theta_b, r);
            QuadratureRecord { index: i as u64, theta_a, theta_b, q_a, q_b }
        });
        self.next += count;
        self.buffer = batch.into_iter();
        true
    }
}

impl<S: Schedule> Iterator for RecordStream<S> {
    type Item = QuadratureRecord;

    fn next(&mut self) -> Option<QuadratureRecord> {
        loop {
            if let Some(r) = self.buffer.next() {
                return Some(r);
            }
            if !self.refill() {
                return None;
            }
        }
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.buffer.len() + self.schedule.len() - self.next;
        (left, Some(left))
    }
}

impl<S: Schedule> ExactSizeIterator for RecordStream<S> {}

/// One joint sample per scheduled setting, deterministic under `seed`.
pub fn simulate_run<S: Schedule>(
    state: &GaussianTwoModeState,
    schedule: S,
    detector: &DetectorModel,
    seed: u64,
) -> Result<RecordStream<S>> {
    Ok(RecordStream {
        sampler: HomodyneSampler::new(state, detector)?,
        schedule,
        seed,
        next: 0,
        buffer: Vec::new().into_iter(),
    })
}

/// One-sample Kolmogorov–Smirnov distance of phases from the uniform law on `[0, 2π)`.
pub fn ks_uniform_statistic(thetas: &[f64]) -> f64 {
    let mut u: Vec<f64> = thetas.iter().map(|t| t.rem_euclid(TAU) / TAU).collect();
    u.sort_by(f64::total_cmp);
    let n = u.len() as f64;
    u.iter()
        .enumerate()
        .map(|(i, &x)| {
            let lo = x - i as f64 / n;
            let hi = (i + 1) as f64 / n - x;
            lo.max(hi)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the one-sample KS statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}
