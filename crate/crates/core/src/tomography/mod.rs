//! State reconstruction from conditioned quadrature densities.
//!
//! Since the conditioned state is phase-insensitive, a single pooled density
//! determines both the Fock diagonal (through pattern functions) and the
//! radially symmetric Wigner function (through filtered backprojection).

mod fock;
mod loss;
mod oracle;
mod pattern;
mod radon;

use std::fmt::Write as _;

pub use fock::{fock_pdf, fock_wavefunction, MAX_FOCK_ORDER};
pub use loss::{binomial_loss, loss_correct, survival_probability, NEGATIVITY_WARNING};
pub use oracle::{
    amplifier_transition, attenuation_kraus_element, conditional_mean_weight, optimal_pair_squeezing,
    oracle_conditioned_state, FockStateVectorTwoMode, OracleParams, TRUNCATION_TOLERANCE,
};
pub use pattern::{pattern_diag, PatternFunctions, MAX_PATTERN_ORDER};
pub use radon::{inverse_radon, inverse_radon_symmetric, FilterSpec, GridSpec, WignerGrid, MIN_POINTS_PER_UNIT, MIN_PROJECTIONS};

use crate::conditioning::{QuadratureDensity, WeightedHistogram};
use crate::{Error, Result};

/// Accepted deviation of a density's integral from 1.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-2;

/// Photon-number probabilities `ρ_nn` for `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDiagonal {
    pub probabilities: Vec<f64>,
}

impl FockDiagonal {
    pub fn new(probabilities: Vec<f64>) -> Self {
        Self { probabilities }
    }

    pub fn n_max(&self) -> usize {
        self.probabilities.len().saturating_sub(1)
    }

    pub fn sum(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn get(&self, n: usize) -> f64 {
        self.probabilities.get(n).copied().unwrap_or(0.0)
    }

    /// Phase-averaged quadrature density `Σ ρ_nn ψ_n(q)²`.
    pub fn quadrature_pdf(&self, q: f64) -> f64 {
        fock::wavefunctions(self.n_max(), q)
            .iter()
            .zip(&self.probabilities)
            .map(|(psi, p)| p * psi * psi)
            .sum()
    }
}

fn check_order(n_max: usize) -> Result<()> {
    if n_max > MAX_PATTERN_ORDER {
        return Err(Error::OrderOutOfRange { requested: n_max, max: MAX_PATTERN_ORDER });
    }
    Ok(())
}

fn project(density: &QuadratureDensity, n_max: usize) -> Vec<f64> {
    let table = PatternFunctions::shared();
    (0..=n_max).map(|n| density.integrate(|q| table.eval(n, q))).collect()
}

/// `ρ_nn = ∫ p(q) f_nn(q) dq` by the midpoint rule on the density's bins.
pub fn fock_diagonal(density: &QuadratureDensity, n_max: usize) -> Result<FockDiagonal> {
    check_order(n_max)?;
    let norm = density.integral();
    if (norm - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::invalid("density", format!("integrates to {norm:.6}, expected 1")));
    }
    Ok(FockDiagonal::new(project(density, n_max)))
}

/// [`fock_diagonal`] of a normalized weighted histogram together with
/// standard errors of each entry.
///
/// Each record contributes `w f_nn(q) / W` to `ρ_nn`, with `W` the total
/// weight, so the ratio-estimator variance is `Σ_j Q_j (f_nn(q_j) − ρ_nn)² / W²`
/// where `Q_j` is the sum of squared weights in bin `j`.
pub fn fock_diagonal_with_errors(histogram: &WeightedHistogram, n_max: usize) -> Result<(FockDiagonal, Vec<f64>)> {
    check_order(n_max)?;
    let density = histogram.normalize()?;
    let diag = fock_diagonal(&density, n_max)?;
    let table = PatternFunctions::shared();
    let binning = histogram.binning();
    let w = histogram.total_weight();
    let errors = diag
        .probabilities
        .iter()
        .enumerate()
        .map(|(n, rho)| {
            let var: f64 = histogram
                .weight_sq_sums()
                .iter()
                .enumerate()
                .map(|(j, q2)| q2 * (table.eval(n, binning.center(j)) - rho).powi(2))
                .sum();
            var.sqrt() / w.abs()
        })
        .collect();
    Ok((diag, errors))
}

/// Reconstructed photon statistics with optional uncertainties and loss correction.
#[derive(Debug, Clone, PartialEq)]
pub struct FockReport {
    pub raw: FockDiagonal,
    pub standard_errors: Option<Vec<f64>>,
    pub corrected: Option<(f64, FockDiagonal)>,
}

impl FockReport {
    pub fn to_text(&self) -> String {
        let mut s = String::from("# twinbeam fock diagonal\n");
        let _ = writeln!(s, "n_max = {}", self.raw.n_max());
        let _ = writeln!(s, "sum = {:.9}", self.raw.sum());
        if let Some((eta, _)) = &self.corrected {
            let _ = writeln!(s, "eta = {eta}");
        }
        s.push_str("n,probability,standard_error,corrected_probability\n");
        for (n, p) in self.raw.probabilities.iter().enumerate() {
            let se = self.standard_errors.as_ref().map_or(String::new(), |e| format!("{:.9e}", e[n]));
            let corrected = self.corrected.as_ref().map_or(String::new(), |(_, c)| format!("{:.9e}", c.probabilities[n]));
            let _ = writeln!(s, "{n},{p:.9e},{se},{corrected}");
        }
        s
    }

    /// Inverse of [`Self::to_text`].
    pub fn parse(text: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse { path: "<fock>".into(), line, message };
        let mut eta = None;
        let mut rows: Vec<(f64, Option<f64>, Option<f64>)> = Vec::new();
        let mut in_table = false;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !in_table {
                if line == "n,probability,standard_error,corrected_probability" {
                    in_table = true;
                } else if let Some(("eta", v)) = line.split_once('=').map(|(k, v)| (k.trim(), v.trim())) {
                    eta = Some(v.parse::<f64>().map_err(|e| err(i + 1, e.to_string()))?);
                }
                continue;
            }
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 4 {
                return Err(err(i + 1, format!("expected 4 fields, found {}", f.len())));
            }
            let n: usize = f[0].parse().map_err(|_| err(i + 1, format!("bad order `{}`", f[0])))?;
            if n != rows.len() {
                return Err(err(i + 1, format!("expected order {}, found {n}", rows.len())));
            }
            let num = |v: &str| v.parse::<f64>().map_err(|e| err(i + 1, e.to_string()));
            let opt = |v: &str| if v.is_empty() { Ok(None) } else { num(v).map(Some) };
            rows.push((num(f[1])?, opt(f[2])?, opt(f[3])?));
        }
        if rows.is_empty() {
            return Err(err(text.lines().count(), "no table rows".into()));
        }
        let raw = FockDiagonal::new(rows.iter().map(|r| r.0).collect());
        let standard_errors = rows.iter().map(|r| r.1).collect::<Option<Vec<_>>>();
        let corrected = rows.iter().map(|r| r.2).collect::<Option<Vec<_>>>();
        let corrected = match (eta, corrected) {
            (Some(eta), Some(c)) => Some((eta, FockDiagonal::new(c))),
            _ => None,
        };
        Ok(Self { raw, standard_errors, corrected })
    }
}
