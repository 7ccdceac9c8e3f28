//! Weighted conditioning against exact conditioned statistics.

use std::f64::consts::{PI, TAU};

use twinbeam_core::acquisition::simulate_run;
use twinbeam_core::conditioning::{accumulate_segments, pooled};
use twinbeam_core::tomography::{
    conditional_mean_weight, fock_diagonal_with_errors, oracle_conditioned_state, OracleParams,
};
use twinbeam_core::{Binning, Calibration, DetectorModel, GaussianTwoModeState, ScanPlan};

const SEED: u64 = 2011;

fn gaussian_mean_weight(r: f64, q: f64) -> f64 {
    let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    c - 1.0 - s * s / (2.0 * c) + s * s * q * q / (2.0 * c * c)
}

#[test]
fn conditional_weight_two_routes_agree() {
    for r in [0.05, 0.092, 0.2, 0.5] {
        for q in [-3.0, -1.0, 0.0, 0.4, 2.2] {
            let fock = conditional_mean_weight(r, q, 1.0).unwrap();
            let gauss = gaussian_mean_weight(r, q);
            assert!((fock - gauss).abs() < 1e-10 * gauss.abs().max(1.0), "r={r} q={q}: {fock} vs {gauss}");
        }
    }
}

#[test]
fn conditional_weight_averages_to_twice_mean_photon_number() {
    let r = 0.3f64;
    let c = (2.0 * r).cosh();
    let n = 4001;
    let h = 24.0 / (n - 1) as f64;
    let avg: f64 = (0..n)
        .map(|i| {
            let q = -12.0 + i as f64 * h;
            let pdf = (-q * q / (2.0 * c)).exp() / (2.0 * PI * c).sqrt();
            pdf * conditional_mean_weight(r, q, 1.0).unwrap()
        })
        .sum::<f64>()
        * h;
    assert!((avg - 2.0 * r.sinh().powi(2)).abs() < 1e-10);
}

#[test]
fn sampled_weighted_density_matches_exact_conditioned_density() {
    let r = 0.3;
    let plan = ScanPlan::new(20, 100_000, 10, 3.0 * TAU).unwrap();
    let binning = Binning::new(60, 6.0).unwrap();
    let records = simulate_run(&GaussianTwoModeState::tmss(r).unwrap(), plan, &DetectorModel::ideal(), SEED).unwrap();
    let h = pooled(&accumulate_segments(records, binning, Calibration::Unit)).unwrap();
    let density = h.normalize().unwrap();
    let c = (2.0 * r).cosh();
    let mean_w = 2.0 * r.sinh().powi(2);
    let n = h.total_count() as f64;
    let mut worst: f64 = 0.0;
    for j in 0..binning.bins {
        let q = binning.center(j);
        let exact = (-q * q / (2.0 * c)).exp() / (2.0 * PI * c).sqrt() * gaussian_mean_weight(r, q) / mean_w;
        // per-bin standard error of the weighted density; sparse tail bins
        // make the plug-in estimate unreliable
        let se = h.weight_sq_sums()[j].sqrt() / (binning.width() * mean_w * n);
        if h.raw_counts()[j] >= 100 {
            worst = worst.max((density.values[j] - exact).abs() / se);
        }
    }
    assert!(worst < 4.5, "largest deviation {worst:.2} standard errors");
}

#[test]
fn pipeline_agrees_with_oracle() {
    // 10^7 records per (r, η); each entry within three standard errors.
    let plan = ScanPlan::new(100, 100_000, 10, 3.0 * TAU).unwrap();
    let mut report = Vec::new();
    let mut failures = Vec::new();
    for r in [0.05, 0.1, 0.2] {
        for eta in [1.0, 0.95, 0.8] {
            let detector = DetectorModel::new(eta, f64::INFINITY, 0.0).unwrap();
            let records = simulate_run(&GaussianTwoModeState::tmss(r).unwrap(), plan, &detector, SEED).unwrap();
            let h = pooled(&accumulate_segments(records, Binning::default(), Calibration::Unit)).unwrap();
            let (diag, errors) = fock_diagonal_with_errors(&h, 3).unwrap();
            let params = OracleParams { eta_a: eta, eta_b: eta, ..OracleParams::ideal(r) };
            let oracle = oracle_conditioned_state(&params, 3).unwrap();
            for (n, se) in errors.iter().enumerate() {
                let z = (diag.get(n) - oracle.get(n)) / se;
                report.push(format!("r={r} eta={eta} n={n}: {:.4} vs {:.4} (z {z:.2})", diag.get(n), oracle.get(n)));
                if z.abs() > 3.0 {
                    failures.push(report.last().unwrap().clone());
                }
            }
        }
    }
    assert!(failures.is_empty(), "{}\nfailures:\n{}", report.join("\n"), failures.join("\n"));
}
