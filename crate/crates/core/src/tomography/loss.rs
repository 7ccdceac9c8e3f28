//! Binomial photon loss on Fock diagonals and its inverse.

use statrs::function::factorial::binomial;

use super::FockDiagonal;
use crate::{Error, Result};

/// Corrected entries below this value trigger a warning.
pub const NEGATIVITY_WARNING: f64 = -0.05;

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::invalid("eta", format!("{eta} is outside (0, 1]")));
    }
    Ok(())
}

/// `P(n | m) = C(m, n) ηⁿ (1 − η)^(m−n)`, zero for `n > m`.
pub fn survival_probability(n: usize, m: usize, eta: f64) -> f64 {
    if n > m {
        return 0.0;
    }
    binomial(m as u64, n as u64) * eta.powi(n as i32) * (1.0 - eta).powi((m - n) as i32)
}

/// `ρ_out(n) = Σ_{m≥n} P(n | m) ρ_in(m)` on the truncated diagonal.
pub fn binomial_loss(diag: &FockDiagonal, eta: f64) -> Result<FockDiagonal> {
    check_eta(eta)?;
    let p = &diag.probabilities;
    let out = (0..p.len())
        .map(|n| (n..p.len()).map(|m| survival_probability(n, m, eta) * p[m]).sum())
        .collect();
    Ok(FockDiagonal::new(out))
}

/// Inverts [`binomial_loss`] by back-substitution from the highest order down.
pub fn loss_correct(diag: &FockDiagonal, eta: f64) -> Result<FockDiagonal> {
    check_eta(eta)?;
    let meas = &diag.probabilities;
    let len = meas.len();
    let mut corrected = vec![0.0; len];
    for n in (0..len).rev() {
        let tail: f64 = (n + 1..len).map(|m| survival_probability(n, m, eta) * corrected[m]).sum();
        corrected[n] = (meas[n] - tail) / eta.powi(n as i32);
    }
    if let Some((n, v)) = corrected.iter().enumerate().find(|(_, v)| **v < NEGATIVITY_WARNING) {
        log::warn!("loss correction at eta = {eta} gives rho_{n}{n} = {v:.4}; the inversion is noise dominated");
    }
    Ok(FockDiagonal::new(corrected))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn unit_efficiency_is_identity() {
        let d = FockDiagonal::new(vec![0.2, 0.5, 0.3]);
        assert_eq!(binomial_loss(&d, 1.0).unwrap(), d);
        assert_eq!(loss_correct(&d, 1.0).unwrap(), d);
    }

    #[test]
    fn half_lossy_single_photon() {
        let d = FockDiagonal::new(vec![0.5, 0.5, 0.0, 0.0]);
        let c = loss_correct(&d, 0.5).unwrap();
        for (got, want) in c.probabilities.iter().zip([0.0, 1.0, 0.0, 0.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn loss_preserves_trace() {
        let d = FockDiagonal::new(vec![0.1, 0.2, 0.3, 0.4]);
        assert!((binomial_loss(&d, 0.3).unwrap().sum() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_eta() {
        let d = FockDiagonal::new(vec![1.0]);
        assert!(loss_correct(&d, 0.0).is_err());
        assert!(binomial_loss(&d, 1.5).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(raw in proptest::collection::vec(0.0f64..1.0, 11), eta in 0.5f64..1.0) {
            let total: f64 = raw.iter().sum::<f64>().max(1e-9);
            let d = FockDiagonal::new(raw.iter().map(|v| v / total).collect());
            let back = loss_correct(&binomial_loss(&d, eta).unwrap(), eta).unwrap();
            for (a, b) in back.probabilities.iter().zip(&d.probabilities) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }
    }
}
