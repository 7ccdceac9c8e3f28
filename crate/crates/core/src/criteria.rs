//! Duan inseparability and Reid–Drummond EPR criteria.
//!
//! With vacuum variance 1, the literal Duan sum
//! `½(Var(X_a ± X_b) + Var(P_a ∓ P_b))` equals 2 for vacuum; the normalized
//! value divides by 2 so separable states score ≥ 1. The Reid–Drummond
//! product `Δ²X_{a|b}·Δ²P_{a|b}` is already vacuum-normalized; below 1 the
//! state demonstrates EPR steering of `a` by `b`.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt::{self, Write as _};

use crate::acquisition::QuadratureRecord;
use crate::gaussian::{GaussianTwoModeState, Mode};
use crate::{Error, Result};

/// Minimum number of pairs per locked setting for [`estimate_from_records`].
pub const MIN_SAMPLES_PER_SETTING: usize = 10_000;
pub const BATCH_COUNT: usize = 20;
const SETTING_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    X,
    P,
}

/// Which sign pairing of the Duan sum was used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DuanPairing {
    /// `Var(X_a + X_b) + Var(P_a − P_b)`
    SumXDiffP,
    /// `Var(X_a − X_b) + Var(P_a + P_b)`
    DiffXSumP,
}

impl DuanPairing {
    pub fn as_str(self) -> &'static str {
        match self {
            DuanPairing::SumXDiffP => "x_sum_p_diff",
            DuanPairing::DiffXSumP => "x_diff_p_sum",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "x_sum_p_diff" => Some(DuanPairing::SumXDiffP),
            "x_diff_p_sum" => Some(DuanPairing::DiffXSumP),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DuanValue {
    pub value: f64,
    pub normalized: f64,
    pub pairing: DuanPairing,
}

/// Second moments of one locked setting `(Q_a, Q_b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct PairMoments {
    var_a: f64,
    var_b: f64,
    cov: f64,
}

impl PairMoments {
    fn from_state(state: &GaussianTwoModeState, theta: f64) -> Self {
        let m = state.quadrature_moments(theta, theta);
        Self { var_a: m.var_a, var_b: m.var_b, cov: m.cov_ab }
    }

    fn from_samples(samples: &[(f64, f64)]) -> Self {
        let n = samples.len() as f64;
        let (sa, sb) = samples.iter().fold((0.0, 0.0), |acc, s| (acc.0 + s.0, acc.1 + s.1));
        let (ma, mb) = (sa / n, sb / n);
        let (mut vaa, mut vbb, mut vab) = (0.0, 0.0, 0.0);
        for &(a, b) in samples {
            let (da, db) = (a - ma, b - mb);
            vaa += da * da;
            vbb += db * db;
            vab += da * db;
        }
        let dof = (n - 1.0).max(1.0);
        Self { var_a: vaa / dof, var_b: vbb / dof, cov: vab / dof }
    }

    fn var_sum(&self) -> f64 {
        self.var_a + self.var_b + 2.0 * self.cov
    }

    fn var_diff(&self) -> f64 {
        self.var_a + self.var_b - 2.0 * self.cov
    }

    /// Residual variance of `Q_a` after optimal linear inference from `Q_b`.
    fn conditional(&self, target: Mode) -> Result<f64> {
        let (target_var, cond_var) = match target {
            Mode::A => (self.var_a, self.var_b),
            Mode::B => (self.var_b, self.var_a),
        };
        if cond_var.is_nan() || cond_var <= 0.0 {
            return Err(Error::Degenerate("conditioning quadrature has zero variance".into()));
        }
        Ok((target_var - self.cov * self.cov / cond_var).max(0.0))
    }
}

fn duan_from_moments(x: &PairMoments, p: &PairMoments, pairing: Option<DuanPairing>) -> DuanValue {
    let sum_diff = 0.5 * (x.var_sum() + p.var_diff());
    let diff_sum = 0.5 * (x.var_diff() + p.var_sum());
    let pairing = pairing.unwrap_or(if sum_diff <= diff_sum { DuanPairing::SumXDiffP } else { DuanPairing::DiffXSumP });
    let value = match pairing {
        DuanPairing::SumXDiffP => sum_diff,
        DuanPairing::DiffXSumP => diff_sum,
    };
    DuanValue { value, normalized: value / 2.0, pairing }
}

/// Duan value of a state, minimized over the two sign pairings.
pub fn duan(state: &GaussianTwoModeState) -> DuanValue {
    let v = duan_from_moments(&PairMoments::from_state(state, 0.0), &PairMoments::from_state(state, FRAC_PI_2), None);
    log::debug!("duan pairing {}", v.pairing.as_str());
    v
}

/// `Var(Q_target) − Cov(Q_a, Q_b)² / Var(Q_other)` for `Q ∈ {X, P}`.
pub fn conditional_variance(state: &GaussianTwoModeState, quadrature: Quadrature, target: Mode) -> Result<f64> {
    let theta = match quadrature {
        Quadrature::X => 0.0,
        Quadrature::P => FRAC_PI_2,
    };
    PairMoments::from_state(state, theta).conditional(target)
}

/// Reid–Drummond product `Δ²X_{a|b}·Δ²P_{a|b}`.
pub fn reid_epr(state: &GaussianTwoModeState) -> Result<f64> {
    Ok(conditional_variance(state, Quadrature::X, Mode::A)? * conditional_variance(state, Quadrature::P, Mode::A)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriteriaReport {
    pub duan_value: f64,
    pub duan_normalized: f64,
    pub duan_pairing: DuanPairing,
    pub cond_var_x: f64,
    pub cond_var_p: f64,
    pub reid_product: f64,
    pub duan_value_se: Option<f64>,
    pub duan_normalized_se: Option<f64>,
    pub cond_var_x_se: Option<f64>,
    pub cond_var_p_se: Option<f64>,
    pub reid_product_se: Option<f64>,
    pub samples_xx: usize,
    pub samples_pp: usize,
}

impl CriteriaReport {
    pub fn analytic(state: &GaussianTwoModeState) -> Result<Self> {
        let d = duan(state);
        let cx = conditional_variance(state, Quadrature::X, Mode::A)?;
        let cp = conditional_variance(state, Quadrature::P, Mode::A)?;
        Ok(Self {
            duan_value: d.value,
            duan_normalized: d.normalized,
            duan_pairing: d.pairing,
            cond_var_x: cx,
            cond_var_p: cp,
            reid_product: cx * cp,
            duan_value_se: None,
            duan_normalized_se: None,
            cond_var_x_se: None,
            cond_var_p_se: None,
            reid_product_se: None,
            samples_xx: 0,
            samples_pp: 0,
        })
    }

    pub fn sample_count(&self) -> usize {
        self.samples_xx + self.samples_pp
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# twinbeam criteria report\n");
        let source = if self.sample_count() == 0 { "analytic" } else { "records" };
        let _ = writeln!(out, "source = {source}");
        let _ = writeln!(out, "duan_pairing = {}", self.duan_pairing.as_str());
        let mut kv = |key: &str, v: f64, se: Option<f64>| {
            let _ = writeln!(out, "{key} = {v}");
            if let Some(se) = se {
                let _ = writeln!(out, "{key}_se = {se}");
            }
        };
        kv("duan_value", self.duan_value, self.duan_value_se);
        kv("duan_normalized", self.duan_normalized, self.duan_normalized_se);
        kv("cond_var_x", self.cond_var_x, self.cond_var_x_se);
        kv("cond_var_p", self.cond_var_p, self.cond_var_p_se);
        kv("reid_product", self.reid_product, self.reid_product_se);
        let _ = writeln!(out, "samples_xx = {}", self.samples_xx);
        let _ = writeln!(out, "samples_pp = {}", self.samples_pp);
        let _ = writeln!(out, "sample_count = {}", self.sample_count());
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                path: "<report>".into(),
                line: i + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        let missing = |k: &str| Error::Parse { path: "<report>".into(), line: 0, message: format!("missing key `{k}`") };
        let bad = |k: &str| Error::Parse { path: "<report>".into(), line: 0, message: format!("bad value for `{k}`") };
        let num = |k: &str| -> Result<f64> { map.get(k).ok_or_else(|| missing(k))?.parse().map_err(|_| bad(k)) };
        let opt = |k: &str| -> Result<Option<f64>> { map.get(k).map(|v| v.parse().map_err(|_| bad(k))).transpose() };
        let count = |k: &str| -> Result<usize> { map.get(k).ok_or_else(|| missing(k))?.parse().map_err(|_| bad(k)) };
        let pairing = map.get("duan_pairing").ok_or_else(|| missing("duan_pairing"))?;
        Ok(Self {
            duan_pairing: DuanPairing::parse(pairing).ok_or_else(|| bad("duan_pairing"))?,
            duan_value: num("duan_value")?,
            duan_normalized: num("duan_normalized")?,
            cond_var_x: num("cond_var_x")?,
            cond_var_p: num("cond_var_p")?,
            reid_product: num("reid_product")?,
            duan_value_se: opt("duan_value_se")?,
            duan_normalized_se: opt("duan_normalized_se")?,
            cond_var_x_se: opt("cond_var_x_se")?,
            cond_var_p_se: opt("cond_var_p_se")?,
            reid_product_se: opt("reid_product_se")?,
            samples_xx: count("samples_xx")?,
            samples_pp: count("samples_pp")?,
        })
    }
}

impl fmt::Display for CriteriaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn near(theta: f64, target: f64) -> bool {
    (theta - target).abs() < SETTING_TOL
}

/// Plug-in estimates of both criteria from records taken at the locked
/// settings `(X, X) = (0, 0)` and `(P, P) = (π/2, π/2)`. Other settings are
/// ignored. Standard errors come from [`BATCH_COUNT`] contiguous batch means.
pub fn estimate_from_records(records: &[QuadratureRecord]) -> Result<CriteriaReport> {
    let mut xx = Vec::new();
    let mut pp = Vec::new();
    for r in records {
        if near(r.theta_a, 0.0) && near(r.theta_b, 0.0) {
            xx.push((r.q_a, r.q_b));
        } else if near(r.theta_a, FRAC_PI_2) && near(r.theta_b, FRAC_PI_2) {
            pp.push((r.q_a, r.q_b));
        }
    }
    for (name, group) in [("(X, X)", &xx), ("(P, P)", &pp)] {
        if group.is_empty() {
            return Err(Error::IncompleteData(format!("no records at setting {name}")));
        }
    }
    for (name, group) in [("(X, X)", &xx), ("(P, P)", &pp)] {
        if group.len() < MIN_SAMPLES_PER_SETTING {
            return Err(Error::InsufficientStatistics(format!(
                "{} pairs at setting {name}, need at least {MIN_SAMPLES_PER_SETTING}",
                group.len()
            )));
        }
    }

    let evaluate = |x: &[(f64, f64)], p: &[(f64, f64)], pairing: Option<DuanPairing>| -> Result<(DuanValue, f64, f64)> {
        let (mx, mp) = (PairMoments::from_samples(x), PairMoments::from_samples(p));
        Ok((duan_from_moments(&mx, &mp, pairing), mx.conditional(Mode::A)?, mp.conditional(Mode::A)?))
    };

    let (full, cond_var_x, cond_var_p) = evaluate(&xx, &pp, None)?;
    let (duan_value, pairing) = (full.value, full.pairing);

    fn batch(group: &[(f64, f64)], j: usize) -> &[(f64, f64)] {
        let len = group.len() / BATCH_COUNT;
        &group[j * len..(j + 1) * len]
    }
    let mut per_batch = Vec::with_capacity(BATCH_COUNT);
    for j in 0..BATCH_COUNT {
        let (d, cx, cp) = evaluate(batch(&xx, j), batch(&pp, j), Some(pairing))?;
        per_batch.push([d.value, cx, cp, cx * cp]);
    }
    let se = |k: usize| {
        let b = BATCH_COUNT as f64;
        let mean = per_batch.iter().map(|v| v[k]).sum::<f64>() / b;
        let var = per_batch.iter().map(|v| (v[k] - mean).powi(2)).sum::<f64>() / (b - 1.0);
        (var / b).sqrt()
    };
    let duan_se = se(0);

    Ok(CriteriaReport {
        duan_value,
        duan_normalized: duan_value / 2.0,
        duan_pairing: pairing,
        cond_var_x,
        cond_var_p,
        reid_product: cond_var_x * cond_var_p,
        duan_value_se: Some(duan_se),
        duan_normalized_se: Some(duan_se / 2.0),
        cond_var_x_se: Some(se(1)),
        cond_var_p_se: Some(se(2)),
        reid_product_se: Some(se(3)),
        samples_xx: xx.len(),
        samples_pp: pp.len(),
    })
}
