//! Harmonic-oscillator eigenfunctions in the vacuum-variance-1 convention.

use crate::{Error, Result};

/// Largest Fock order evaluated by [`fock_wavefunction`].
pub const MAX_FOCK_ORDER: usize = 60;

/// `(2π)^(−1/4)`
const PSI0_NORM: f64 = 0.631_618_777_746_064_7;

/// `ψ_0, …, ψ_{n_max}` at `q`, by the upward recursion
/// `ψ_{k+1} = (q ψ_k − √k ψ_{k−1}) / √(k+1)`.
pub(crate) fn wavefunctions(n_max: usize, q: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(PSI0_NORM * (-0.25 * q * q).exp());
    if n_max >= 1 {
        out.push(q * out[0]);
    }
    for k in 1..n_max {
        let next = (q * out[k] - (k as f64).sqrt() * out[k - 1]) / ((k + 1) as f64).sqrt();
        out.push(next);
    }
    out
}

/// `(ψ_n(q), ψ_n'(q))` using `ψ_n' = ½(√n ψ_{n−1} − √(n+1) ψ_{n+1})`.
pub(crate) fn wavefunction_with_derivative(n: usize, q: f64) -> (f64, f64) {
    let psi = wavefunctions(n + 1, q);
    let lower = if n == 0 { 0.0 } else { (n as f64).sqrt() * psi[n - 1] };
    (psi[n], 0.5 * (lower - ((n + 1) as f64).sqrt() * psi[n + 1]))
}

/// `⟨q|n⟩`, normalized so `∫ψ_n² dq = 1`; `|ψ_0|²` is the unit-variance
/// normal density.
pub fn fock_wavefunction(n: usize, q: f64) -> Result<f64> {
    if n > MAX_FOCK_ORDER {
        return Err(Error::OrderOutOfRange { requested: n, max: MAX_FOCK_ORDER });
    }
    Ok(wavefunctions(n, q)[n])
}

/// Quadrature density `|ψ_n(q)|²` of the Fock state `|n⟩`, the same at every phase.
pub fn fock_pdf(n: usize, q: f64) -> Result<f64> {
    fock_wavefunction(n, q).map(|psi| psi * psi)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Composite Simpson rule on `[−a, a]`.
    fn simpson(a: f64, f: impl Fn(f64) -> f64) -> f64 {
        let n = 8000;
        let h = 2.0 * a / n as f64;
        (0..=n)
            .map(|i| {
                let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                w * f(-a + i as f64 * h)
            })
            .sum::<f64>()
            * h
            / 3.0
    }

    fn integrate(f: impl Fn(f64) -> f64) -> f64 {
        simpson(12.0, f)
    }

    #[test]
    fn ground_state_value() {
        assert!((fock_wavefunction(0, 0.0).unwrap() - 0.63162).abs() < 1e-5);
        assert!((PSI0_NORM - (2.0 * std::f64::consts::PI).powf(-0.25)).abs() < 1e-15);
    }

    #[test]
    fn normalized_and_orthogonal() {
        for n in 0..=20 {
            for m in 0..=n {
                let v = integrate(|q| fock_wavefunction(n, q).unwrap() * fock_wavefunction(m, q).unwrap());
                let expected = if n == m { 1.0 } else { 0.0 };
                assert!((v - expected).abs() < 1e-8, "<{n}|{m}> = {v}");
            }
        }
        let norm40 = simpson(20.0, |q| fock_pdf(40, q).unwrap());
        assert!((norm40 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn photon_number_relation() {
        // ⟨q²⟩ = 2n + 1, i.e. n + ½ = ¼(⟨X²⟩ + ⟨P²⟩) for a phase-symmetric state.
        for n in 0..6 {
            let q2 = integrate(|q| q * q * fock_pdf(n, q).unwrap());
            assert!((q2 - (2 * n + 1) as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for n in [0, 1, 4, 9] {
            for q in [-2.3, 0.0, 0.7, 3.1] {
                let (_, d) = wavefunction_with_derivative(n, q);
                let h = 1e-5;
                let fd = (fock_wavefunction(n, q + h).unwrap() - fock_wavefunction(n, q - h).unwrap()) / (2.0 * h);
                assert!((d - fd).abs() < 1e-8, "n={n} q={q}");
            }
        }
    }

    #[test]
    fn order_guard() {
        assert!(fock_wavefunction(61, 0.0).is_err());
        assert!(fock_wavefunction(60, 1.0).is_ok());
    }
}
