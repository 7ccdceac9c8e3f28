use std::fmt::Write as _;

use crate::acquisition::QuadratureRecord;
use crate::{Error, Result};

use super::{weight, Calibration};

/// Significance required of a histogram's total weight before it may be
/// normalized, in standard errors.
pub const SIGNIFICANCE_SIGMAS: f64 = 5.0;
const LABEL_TOL: f64 = 1e-6;

/// Uniform bins over `[−q_max, q_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Binning {
    pub bins: usize,
    pub q_max: f64,
}

impl Default for Binning {
    fn default() -> Self {
        Self { bins: 201, q_max: 6.0 }
    }
}

impl Binning {
    pub fn new(bins: usize, q_max: f64) -> Result<Self> {
        if bins == 0 {
            return Err(Error::invalid("bins", "must be at least 1"));
        }
        if !(q_max > 0.0 && q_max.is_finite()) {
            return Err(Error::invalid("q_max", "must be positive and finite"));
        }
        Ok(Self { bins, q_max })
    }

    pub fn width(&self) -> f64 {
        2.0 * self.q_max / self.bins as f64
    }

    pub fn center(&self, j: usize) -> f64 {
        -self.q_max + (j as f64 + 0.5) * self.width()
    }

    pub fn index(&self, q: f64) -> Option<usize> {
        let t = (q + self.q_max) / self.width();
        if t >= 0.0 && t < self.bins as f64 {
            Some(t as usize)
        } else {
            None
        }
    }
}

/// A probability density sampled at the centers of uniform bins.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureDensity {
    pub q_min: f64,
    pub width: f64,
    pub values: Vec<f64>,
}

impl QuadratureDensity {
    /// Samples `pdf` at the midpoints of `n` bins spanning `[q_min, q_max]`.
    pub fn from_fn(q_min: f64, q_max: f64, n: usize, pdf: impl Fn(f64) -> f64) -> Self {
        let width = (q_max - q_min) / n as f64;
        let values = (0..n).map(|j| pdf(q_min + (j as f64 + 0.5) * width)).collect();
        Self { q_min, width, values }
    }

    pub fn center(&self, j: usize) -> f64 {
        self.q_min + (j as f64 + 0.5) * self.width
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(|j| self.center(j))
    }

    /// Midpoint-rule integral of `density · g`.
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.values.iter().enumerate().map(|(j, v)| v * g(self.center(j))).sum::<f64>() * self.width
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.width
    }

    /// Mixes the density with its mirror image `q → −q`.
    pub fn symmetrized(&self) -> Self {
        let n = self.values.len();
        let centered = (self.q_min + 0.5 * n as f64 * self.width).abs() < 1e-9 * self.width.max(1.0);
        if !centered {
            return self.clone();
        }
        let values = (0..n).map(|j| 0.5 * (self.values[j] + self.values[n - 1 - j])).collect();
        Self { values, ..*self }
    }

    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        Self { values, ..*self }
    }
}

/// Weighted quadrature histogram for mode `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedHistogram {
    binning: Binning,
    theta_a: Option<f64>,
    weight_sums: Vec<f64>,
    weight_sq_sums: Vec<f64>,
    raw_counts: Vec<u64>,
    total_weight: f64,
    total_weight_sq: f64,
    total_count: u64,
    underflow: u64,
    overflow: u64,
    out_of_range_weight: f64,
}

impl WeightedHistogram {
    /// `theta_a` labels a fixed-phase segment; `None` is a pooled histogram.
    pub fn new(binning: Binning, theta_a: Option<f64>) -> Self {
        Self {
            binning,
            theta_a,
            weight_sums: vec![0.0; binning.bins],
            weight_sq_sums: vec![0.0; binning.bins],
            raw_counts: vec![0; binning.bins],
            total_weight: 0.0,
            total_weight_sq: 0.0,
            total_count: 0,
            underflow: 0,
            overflow: 0,
            out_of_range_weight: 0.0,
        }
    }

    pub fn binning(&self) -> &Binning {
        &self.binning
    }

    pub fn theta_a(&self) -> Option<f64> {
        self.theta_a
    }

    pub fn weight_sums(&self) -> &[f64] {
        &self.weight_sums
    }

    pub fn weight_sq_sums(&self) -> &[f64] {
        &self.weight_sq_sums
    }

    pub fn raw_counts(&self) -> &[u64] {
        &self.raw_counts
    }

    /// Sum of in-range weights.
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    /// In-range record count.
    pub fn total_count(&self) -> u64 {
        self.total_count
    }

    /// All records seen, including those outside the binning range.
    pub fn records_seen(&self) -> u64 {
        self.total_count + self.underflow + self.overflow
    }

    pub fn out_of_range_fraction(&self) -> f64 {
        let seen = self.records_seen();
        if seen == 0 {
            0.0
        } else {
            (self.underflow + self.overflow) as f64 / seen as f64
        }
    }

    pub fn add(&mut self, q_a: f64, w: f64) {
        match self.binning.index(q_a) {
            Some(j) => {
                self.weight_sums[j] += w;
                self.weight_sq_sums[j] += w * w;
                self.raw_counts[j] += 1;
                self.total_weight += w;
                self.total_weight_sq += w * w;
                self.total_count += 1;
            }
            None => {
                if q_a < 0.0 {
                    self.underflow += 1;
                } else {
                    self.overflow += 1;
                }
                self.out_of_range_weight += w;
            }
        }
    }

    /// Adds records whose `θ_a` matches this histogram's label; pooled
    /// histograms accept every record.
    pub fn accumulate<'a, I>(&mut self, records: I, calibration: Calibration) -> Result<()>
    where
        I: IntoIterator<Item = &'a QuadratureRecord>,
    {
        for r in records {
            if let Some(label) = self.theta_a {
                if (r.theta_a - label).abs() > LABEL_TOL {
                    return Err(Error::invalid(
                        "theta_a",
                        format!("record {} at θ_a = {} does not belong to segment θ_a = {label}", r.index, r.theta_a),
                    ));
                }
            }
            self.add(r.q_a, weight(r.q_b, calibration));
        }
        Ok(())
    }

    /// Entrywise sum. Histograms with different labels merge into a pooled one.
    pub fn merge(&mut self, other: &Self) -> Result<()> {
        if self.binning != other.binning {
            return Err(Error::BinningMismatch(format!("{:?} vs {:?}", self.binning, other.binning)));
        }
        if self.theta_a != other.theta_a {
            self.theta_a = None;
        }
        for j in 0..self.binning.bins {
            self.weight_sums[j] += other.weight_sums[j];
            self.weight_sq_sums[j] += other.weight_sq_sums[j];
            self.raw_counts[j] += other.raw_counts[j];
        }
        self.total_weight += other.total_weight;
        self.total_weight_sq += other.total_weight_sq;
        self.total_count += other.total_count;
        self.underflow += other.underflow;
        self.overflow += other.overflow;
        self.out_of_range_weight += other.out_of_range_weight;
        Ok(())
    }

    pub fn mean_weight(&self) -> f64 {
        self.total_weight / self.total_count.max(1) as f64
    }

    /// Standard error of [`Self::total_weight`] treating weights as i.i.d.
    pub fn total_weight_se(&self) -> f64 {
        let n = self.total_count as f64;
        if n < 2.0 {
            return f64::INFINITY;
        }
        let var = (self.total_weight_sq - self.total_weight * self.total_weight / n) / (n - 1.0);
        (n * var.max(0.0)).sqrt()
    }

    pub(crate) fn density_unchecked(&self) -> QuadratureDensity {
        let scale = 1.0 / (self.binning.width() * self.total_weight);
        QuadratureDensity {
            q_min: -self.binning.q_max,
            width: self.binning.width(),
            values: self.weight_sums.iter().map(|w| w * scale).collect(),
        }
    }

    /// Conditioned density `weight_sums / (bin_width · total_weight)`.
    /// Negative bins are kept as they are.
    pub fn normalize(&self) -> Result<QuadratureDensity> {
        let se = self.total_weight_se();
        if self.total_weight.is_nan() || self.total_weight <= SIGNIFICANCE_SIGMAS * se {
            return Err(Error::DegenerateConditioning(format!(
                "total weight {:.4e} is not above {SIGNIFICANCE_SIGMAS}× its standard error {:.4e}",
                self.total_weight, se
            )));
        }
        Ok(self.density_unchecked())
    }

    /// Unconditioned density from the raw counts.
    pub fn normalize_counts(&self) -> Result<QuadratureDensity> {
        if self.total_count == 0 {
            return Err(Error::InsufficientStatistics("empty histogram".into()));
        }
        let scale = 1.0 / (self.binning.width() * self.total_count as f64);
        Ok(QuadratureDensity {
            q_min: -self.binning.q_max,
            width: self.binning.width(),
            values: self.raw_counts.iter().map(|&c| c as f64 * scale).collect(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("# twinbeam weighted histogram v1\n");
        let _ = writeln!(s, "bins = {}", self.binning.bins);
        let _ = writeln!(s, "q_max = {}", self.binning.q_max);
        match self.theta_a {
            Some(t) => {
                let _ = writeln!(s, "theta_a = {t}");
            }
            None => s.push_str("theta_a = pooled\n"),
        }
        let _ = writeln!(s, "total_weight = {}", self.total_weight);
        let _ = writeln!(s, "total_weight_sq = {}", self.total_weight_sq);
        let _ = writeln!(s, "total_count = {}", self.total_count);
        let _ = writeln!(s, "underflow = {}", self.underflow);
        let _ = writeln!(s, "overflow = {}", self.overflow);
        let _ = writeln!(s, "out_of_range_weight = {}", self.out_of_range_weight);
        s.push_str("center,weight_sum,raw_count,weight_sq_sum\n");
        for j in 0..self.binning.bins {
            let _ = writeln!(
                s,
                "{},{},{},{}",
                self.binning.center(j),
                self.weight_sums[j],
                self.raw_counts[j],
                self.weight_sq_sums[j]
            );
        }
        s
    }

    /// Parses one or more histograms written by [`Self::to_text`] back to back.
    pub fn parse_all(text: &str) -> Result<Vec<Self>> {
        let err = |line: usize, message: String| Error::Parse { path: "<histogram>".into(), line, message };
        let lines: Vec<&str> = text.lines().collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < lines.len() {
            if lines[i].trim().is_empty() || lines[i].starts_with('#') {
                i += 1;
                continue;
            }
            let mut meta = std::collections::BTreeMap::new();
            while i < lines.len() && lines[i].contains('=') {
                let (k, v) = lines[i].split_once('=').expect("contains '='");
                meta.insert(k.trim(), (i + 1, v.trim()));
                i += 1;
            }
            let get = |k: &str| meta.get(k).copied().ok_or_else(|| err(i + 1, format!("missing `{k}`")));
            let num = |k: &str| -> Result<f64> {
                let (line, v) = get(k)?;
                v.parse().map_err(|_| err(line, format!("bad value for `{k}`: `{v}`")))
            };
            let int = |k: &str| -> Result<u64> {
                let (line, v) = get(k)?;
                v.parse().map_err(|_| err(line, format!("bad value for `{k}`: `{v}`")))
            };
            let binning = Binning::new(int("bins")? as usize, num("q_max")?)?;
            let theta_a = match get("theta_a")?.1 {
                "pooled" => None,
                _ => Some(num("theta_a")?),
            };
            let mut h = WeightedHistogram::new(binning, theta_a);
            h.total_weight = num("total_weight")?;
            h.total_weight_sq = num("total_weight_sq")?;
            h.total_count = int("total_count")?;
            h.underflow = int("underflow")?;
            h.overflow = int("overflow")?;
            h.out_of_range_weight = num("out_of_range_weight")?;
            if lines.get(i).map(|l| l.trim()) != Some("center,weight_sum,raw_count,weight_sq_sum") {
                return Err(err(i + 1, "expected per-bin header".into()));
            }
            i += 1;
            for j in 0..binning.bins {
                let line = lines.get(i).ok_or_else(|| err(i + 1, "missing bin rows".into()))?;
                let f: Vec<&str> = line.split(',').collect();
                if f.len() != 4 {
                    return Err(err(i + 1, format!("expected 4 fields, found {}", f.len())));
                }
                let bad = |what: &str| err(i + 1, format!("bad {what}"));
                h.weight_sums[j] = f[1].trim().parse().map_err(|_| bad("weight_sum"))?;
                h.raw_counts[j] = f[2].trim().parse().map_err(|_| bad("raw_count"))?;
                h.weight_sq_sums[j] = f[3].trim().parse().map_err(|_| bad("weight_sq_sum"))?;
                i += 1;
            }
            out.push(h);
        }
        Ok(out)
    }
}
