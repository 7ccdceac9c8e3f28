//! Diagonal pattern functions `f_nn(q) = ∂_q[ψ_n(q) φ_n(q)]`.
//!
//! `φ_n` is the irregular solution of `y'' = (q²/4 − n − ½) y` with parity
//! opposite to `ψ_n`, scaled so that the Wronskian `ψ_n φ_n' − ψ_n' φ_n`
//! equals 2. With that scaling `∫ f_nn(q) ψ_m(q)² dq = δ_nm`, so
//! `ρ_nn = ∫ p(q) f_nn(q) dq` for any phase-averaged quadrature density `p`.
//!
//! `φ_n` grows like `e^{q²/4}`, so integrating outward from the origin
//! follows the dominant solution and is stable. Nodes `(φ, φ')` are stored
//! every `STEP`; off-node values take one extra RK4 step from the node below.

use std::sync::OnceLock;

use super::fock::{wavefunction_with_derivative, MAX_FOCK_ORDER};
use crate::{Error, Result};

pub const MAX_PATTERN_ORDER: usize = 30;
const STEP: f64 = 1e-3;
const TABLE_EXTENT: f64 = 20.0;
const WRONSKIAN: f64 = 2.0;

#[derive(Debug, Clone)]
pub struct PatternFunctions {
    n_max: usize,
    nodes: Vec<Vec<[f64; 2]>>,
}

fn rk4_step(n: usize, q: f64, y: [f64; 2], h: f64) -> [f64; 2] {
    let energy = n as f64 + 0.5;
    let rhs = |q: f64, y: [f64; 2]| [y[1], (0.25 * q * q - energy) * y[0]];
    let k1 = rhs(q, y);
    let k2 = rhs(q + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
    let k3 = rhs(q + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
    let k4 = rhs(q + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

impl PatternFunctions {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max > MAX_PATTERN_ORDER || n_max + 1 > MAX_FOCK_ORDER {
            return Err(Error::OrderOutOfRange { requested: n_max, max: MAX_PATTERN_ORDER });
        }
        let steps = (TABLE_EXTENT / STEP).round() as usize;
        let nodes = (0..=n_max)
            .map(|n| {
                let (psi, dpsi) = wavefunction_with_derivative(n, 0.0);
                // Opposite parity to ψ_n, Wronskian fixed at the origin.
                let mut y = if n % 2 == 0 { [0.0, WRONSKIAN / psi] } else { [-WRONSKIAN / dpsi, 0.0] };
                let mut table = Vec::with_capacity(steps + 1);
                table.push(y);
                for k in 0..steps {
                    y = rk4_step(n, k as f64 * STEP, y, STEP);
                    table.push(y);
                }
                table
            })
            .collect();
        Ok(Self { n_max, nodes })
    }

    /// Shared table up to [`MAX_PATTERN_ORDER`].
    pub fn shared() -> &'static Self {
        static TABLE: OnceLock<PatternFunctions> = OnceLock::new();
        TABLE.get_or_init(|| PatternFunctions::new(MAX_PATTERN_ORDER).expect("order within range"))
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `f_nn(q)` for `n ≤ n_max`.
    pub fn eval(&self, n: usize, q: f64) -> f64 {
        assert!(n <= self.n_max, "pattern order {n} exceeds table order {}", self.n_max);
        let a = q.abs();
        if a >= TABLE_EXTENT {
            // f_nn ∝ q⁻² asymptotically
            let edge = self.eval(n, TABLE_EXTENT * (1.0 - 1e-12));
            return edge * (TABLE_EXTENT / a).powi(2);
        }
        let k = ((a / STEP) as usize).min(self.nodes[n].len() - 1);
        let q0 = k as f64 * STEP;
        let [phi, dphi] = if a > q0 { rk4_step(n, q0, self.nodes[n][k], a - q0) } else { self.nodes[n][k] };
        let (psi, dpsi) = wavefunction_with_derivative(n, a);
        dpsi * phi + psi * dphi
    }
}

/// `f_nn(q)` from the shared table.
pub fn pattern_diag(n: usize, q: f64) -> Result<f64> {
    if n > MAX_PATTERN_ORDER {
        return Err(Error::OrderOutOfRange { requested: n, max: MAX_PATTERN_ORDER });
    }
    Ok(PatternFunctions::shared().eval(n, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tomography::fock::fock_pdf;

    #[test]
    fn origin_values_alternate() {
        for n in 0..=10 {
            let expected = if n % 2 == 0 { 2.0 } else { -2.0 };
            assert!((pattern_diag(n, 0.0).unwrap() - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn even_in_q() {
        for n in 0..=10 {
            for q in [0.3, 1.7, 4.2, 9.9] {
                assert_eq!(pattern_diag(n, q).unwrap(), pattern_diag(n, -q).unwrap());
            }
        }
    }

    #[test]
    fn vacuum_integrates_to_one() {
        let h = 24.0 / 2000.0;
        let v: f64 = (0..=2000)
            .map(|i| {
                let q = -12.0 + i as f64 * h;
                let w = if i == 0 || i == 2000 { 0.5 } else { 1.0 };
                w * pattern_diag(0, q).unwrap() * fock_pdf(0, q).unwrap()
            })
            .sum::<f64>()
            * h;
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn off_node_evaluation_is_smooth() {
        let q = 2.0 + 0.5 * STEP;
        let mid = pattern_diag(3, q).unwrap();
        let avg = 0.5 * (pattern_diag(3, 2.0).unwrap() + pattern_diag(3, 2.0 + STEP).unwrap());
        assert!((mid - avg).abs() < 1e-5);
    }

    #[test]
    fn order_guard() {
        assert!(pattern_diag(MAX_PATTERN_ORDER + 1, 0.0).is_err());
        assert!(PatternFunctions::new(MAX_PATTERN_ORDER + 1).is_err());
    }
}
