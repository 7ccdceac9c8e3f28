//! Gaussian two-mode states in the vacuum-variance-1 quadrature convention.
//!
//! Vectors and matrices are ordered `(X_a, P_a, X_b, P_b)`. The measured
//! quadrature at local-oscillator phase `θ` is `Q_θ = cos θ·X + sin θ·P`.
//!
//! Sign convention: the balanced beamsplitter maps input modes 1, 2 to
//! `a = (a₁ + a₂)/√2`, `b = (a₁ − a₂)/√2`. Feeding it an X-squeezed beam in
//! port 1 and a P-squeezed beam in port 2 gives `Cov(X_a, X_b) < 0` and
//! `Cov(P_a, P_b) > 0`, the same signs as the two-mode squeezed vacuum with
//! Fock amplitudes `(−tanh r)ⁿ / cosh r`.

mod sampling;

pub use sampling::{sample_joint_quadratures, HomodyneSampler};

use nalgebra::{Matrix2, Matrix4, SymmetricEigen, Vector2, Vector4};

use crate::{Error, Result};

/// Tolerance on symplectic eigenvalues below the vacuum value.
pub const PHYSICALITY_TOL: f64 = 1e-6;
const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    A,
    B,
}

impl Mode {
    fn offset(self) -> usize {
        match self {
            Mode::A => 0,
            Mode::B => 2,
        }
    }
}

/// Squeezing and anti-squeezing of one parametric amplifier, in dB relative
/// to shot noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezerSpec {
    pub squeeze_db: f64,
    pub antisqueeze_db: f64,
}

impl SqueezerSpec {
    pub fn new(squeeze_db: f64, antisqueeze_db: f64) -> Result<Self> {
        let spec = Self { squeeze_db, antisqueeze_db };
        spec.validate()?;
        Ok(spec)
    }

    /// Symmetric pure squeezer with `e^{∓2r}` variances.
    pub fn pure(r: f64) -> Self {
        let db = 20.0 * r / std::f64::consts::LN_10;
        Self { squeeze_db: db, antisqueeze_db: db }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.squeeze_db >= 0.0 && self.squeeze_db.is_finite()) {
            return Err(Error::invalid("squeeze_db", "must be a finite, nonnegative number of dB"));
        }
        if !(self.antisqueeze_db >= 0.0 && self.antisqueeze_db.is_finite()) {
            return Err(Error::invalid("antisqueeze_db", "must be a finite, nonnegative number of dB"));
        }
        let (vs, va) = self.variances();
        if vs * va < 1.0 - PHYSICALITY_TOL {
            return Err(Error::Unphysical(format!(
                "squeezer {} dB / {} dB has V_s·V_a = {:.6} < 1",
                self.squeeze_db,
                self.antisqueeze_db,
                vs * va
            )));
        }
        Ok(())
    }

    /// `(V_s, V_a)` in vacuum units.
    pub fn variances(&self) -> (f64, f64) {
        (db_to_ratio(-self.squeeze_db), db_to_ratio(self.antisqueeze_db))
    }

    pub fn is_pure(&self) -> bool {
        let (vs, va) = self.variances();
        (vs * va - 1.0).abs() <= PHYSICALITY_TOL
    }
}

pub fn db_to_ratio(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Balanced homodyne detector with finite efficiency, electronic (dark)
/// noise and optional Gaussian jitter of the locked phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel {
    pub efficiency: f64,
    /// Shot-noise clearance over dark noise; `f64::INFINITY` means no dark noise.
    pub dark_clearance_db: f64,
    pub phase_jitter_rad: f64,
}

impl Default for DetectorModel {
    fn default() -> Self {
        Self::ideal()
    }
}

impl DetectorModel {
    pub fn ideal() -> Self {
        Self { efficiency: 1.0, dark_clearance_db: f64::INFINITY, phase_jitter_rad: 0.0 }
    }

    pub fn new(efficiency: f64, dark_clearance_db: f64, phase_jitter_rad: f64) -> Result<Self> {
        let d = Self { efficiency, dark_clearance_db, phase_jitter_rad };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(Error::invalid("efficiency", format!("{} is outside (0, 1]", self.efficiency)));
        }
        if self.dark_clearance_db.is_nan() {
            return Err(Error::invalid("dark_clearance_db", "must be a number"));
        }
        if !(self.phase_jitter_rad >= 0.0 && self.phase_jitter_rad.is_finite()) {
            return Err(Error::invalid("phase_jitter_rad", "must be finite and nonnegative"));
        }
        Ok(())
    }

    /// Dark-noise variance in vacuum units, `10^(−clearance/10)`.
    pub fn dark_variance(&self) -> f64 {
        db_to_ratio(-self.dark_clearance_db)
    }
}

fn rotation(phi: f64) -> Matrix2<f64> {
    let (s, c) = phi.sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// Single-mode Gaussian state, `(X, P)` ordering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleModeState {
    mean: Vector2<f64>,
    cov: Matrix2<f64>,
}

impl SingleModeState {
    pub fn new(mean: Vector2<f64>, cov: Matrix2<f64>) -> Result<Self> {
        let scale = cov.abs().max().max(1.0);
        if (cov[(0, 1)] - cov[(1, 0)]).abs() > SYMMETRY_TOL * scale {
            return Err(Error::Unphysical("covariance is not symmetric".into()));
        }
        let det = cov.determinant();
        if cov[(0, 0)] < 0.0 || cov[(1, 1)] < 0.0 || det < 1.0 - PHYSICALITY_TOL {
            return Err(Error::Unphysical(format!("single-mode covariance with det {det:.6} < 1")));
        }
        Ok(Self { mean, cov })
    }

    pub fn vacuum() -> Self {
        Self { mean: Vector2::zeros(), cov: Matrix2::identity() }
    }

    /// X-squeezed state `diag(V_s, V_a)`.
    pub fn squeezed(spec: &SqueezerSpec) -> Result<Self> {
        spec.validate()?;
        let (vs, va) = spec.variances();
        Ok(Self { mean: Vector2::zeros(), cov: Matrix2::new(vs, 0.0, 0.0, va) })
    }

    pub fn rotate(&self, phi: f64) -> Self {
        let r = rotation(phi);
        Self { mean: r * self.mean, cov: r * self.cov * r.transpose() }
    }

    pub fn apply_loss(&self, eta: f64) -> Result<Self> {
        check_efficiency(eta)?;
        Ok(Self {
            mean: self.mean * eta.sqrt(),
            cov: self.cov * eta + Matrix2::identity() * (1.0 - eta),
        })
    }

    pub fn mean(&self) -> &Vector2<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &Matrix2<f64> {
        &self.cov
    }
}

fn check_efficiency(eta: f64) -> Result<()> {
    if eta > 0.0 && eta <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid("efficiency", format!("{eta} is outside (0, 1]")))
    }
}

/// Second moments of one joint homodyne setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureMoments {
    pub mean_a: f64,
    pub mean_b: f64,
    pub var_a: f64,
    pub var_b: f64,
    pub cov_ab: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianTwoModeState {
    mean: Vector4<f64>,
    cov: Matrix4<f64>,
}

impl GaussianTwoModeState {
    /// Validates symmetry, positive semidefiniteness and the uncertainty
    /// principle (all symplectic eigenvalues ≥ 1).
    pub fn new(mean: Vector4<f64>, cov: Matrix4<f64>) -> Result<Self> {
        if mean.iter().chain(cov.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Unphysical("non-finite moments".into()));
        }
        let scale = cov.abs().max().max(1.0);
        if (cov - cov.transpose()).abs().max() > SYMMETRY_TOL * scale {
            return Err(Error::Unphysical("covariance is not symmetric".into()));
        }
        let state = Self { mean, cov: (cov + cov.transpose()) * 0.5 };
        let min_eig = SymmetricEigen::new(state.cov).eigenvalues.min();
        if min_eig < -SYMMETRY_TOL * scale {
            return Err(Error::Unphysical(format!("covariance has negative eigenvalue {min_eig:e}")));
        }
        let (nu_minus, _) = state.symplectic_eigenvalues();
        if nu_minus < 1.0 - PHYSICALITY_TOL {
            return Err(Error::Unphysical(format!("smallest symplectic eigenvalue {nu_minus:.9} < 1")));
        }
        Ok(state)
    }

    pub fn vacuum() -> Self {
        Self { mean: Vector4::zeros(), cov: Matrix4::identity() }
    }

    /// Pure two-mode squeezed vacuum with squeezing parameter `r`.
    pub fn tmss(r: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::invalid("r", format!("{r} must be finite and nonnegative")));
        }
        let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
        #[rustfmt::skip]
        let cov = Matrix4::new(
            c, 0.0, -s, 0.0,
            0.0, c, 0.0, s,
            -s, 0.0, c, 0.0,
            0.0, s, 0.0, c,
        );
        Ok(Self { mean: Vector4::zeros(), cov })
    }

    /// Uncorrelated product `s_a ⊗ s_b`.
    pub fn product(a: &SingleModeState, b: &SingleModeState) -> Self {
        let mut mean = Vector4::zeros();
        let mut cov = Matrix4::zeros();
        mean.fixed_rows_mut::<2>(0).copy_from(&a.mean);
        mean.fixed_rows_mut::<2>(2).copy_from(&b.mean);
        cov.fixed_view_mut::<2, 2>(0, 0).copy_from(&a.cov);
        cov.fixed_view_mut::<2, 2>(2, 2).copy_from(&b.cov);
        Self { mean, cov }
    }

    /// Mixes two single-mode beams on a 50:50 beamsplitter.
    pub fn beamsplit_5050(s1: &SingleModeState, s2: &SingleModeState) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        #[rustfmt::skip]
        let bs = Matrix4::new(
            h, 0.0, h, 0.0,
            0.0, h, 0.0, h,
            h, 0.0, -h, 0.0,
            0.0, h, 0.0, -h,
        );
        let input = Self::product(s1, s2);
        Self { mean: bs * input.mean, cov: bs * input.cov * bs.transpose() }
    }

    /// Two squeezers locked at `relative_phase` and mixed on the beamsplitter.
    /// `π/2` gives the entangled twin beams.
    pub fn entangled_pair(spec: &SqueezerSpec, relative_phase: f64) -> Result<Self> {
        let s1 = SingleModeState::squeezed(spec)?;
        Ok(Self::beamsplit_5050(&s1, &s1.rotate(relative_phase)))
    }

    pub fn mean(&self) -> &Vector4<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &Matrix4<f64> {
        &self.cov
    }

    pub fn block(&self, row: Mode, col: Mode) -> Matrix2<f64> {
        self.cov.fixed_view::<2, 2>(row.offset(), col.offset()).into_owned()
    }

    fn with_local(&self, mode: Mode, map: Matrix2<f64>) -> Self {
        let mut s = Matrix4::identity();
        s.fixed_view_mut::<2, 2>(mode.offset(), mode.offset()).copy_from(&map);
        Self { mean: s * self.mean, cov: s * self.cov * s.transpose() }
    }

    /// Phase-space rotation of one mode by `phi`.
    pub fn rotate(&self, mode: Mode, phi: f64) -> Self {
        self.with_local(mode, rotation(phi))
    }

    /// Pure loss: the mode's block maps `V → ηV + (1−η)·1`, cross blocks scale by `√η`.
    pub fn apply_loss(&self, mode: Mode, eta: f64) -> Result<Self> {
        check_efficiency(eta)?;
        let mut out = self.with_local(mode, Matrix2::identity() * eta.sqrt());
        let o = mode.offset();
        out.cov[(o, o)] += 1.0 - eta;
        out.cov[(o + 1, o + 1)] += 1.0 - eta;
        Ok(out)
    }

    /// Classical additive Gaussian noise of variance `variance` on both
    /// quadratures of a mode.
    pub fn add_noise(&self, mode: Mode, variance: f64) -> Result<Self> {
        if !(variance >= 0.0 && variance.is_finite()) {
            return Err(Error::invalid("variance", format!("{variance} must be finite and nonnegative")));
        }
        let mut out = *self;
        let o = mode.offset();
        out.cov[(o, o)] += variance;
        out.cov[(o + 1, o + 1)] += variance;
        Ok(out)
    }

    /// Average over a Gaussian-distributed random rotation of one mode with
    /// standard deviation `sigma`.
    pub fn dephase(&self, mode: Mode, sigma: f64) -> Self {
        if sigma == 0.0 {
            return *self;
        }
        let first = (-0.5 * sigma * sigma).exp();
        let second = (-2.0 * sigma * sigma).exp();
        let o = mode.offset();
        let other = 2 - o;
        let mut out = *self;
        let (xx, pp, xp) = (self.cov[(o, o)], self.cov[(o + 1, o + 1)], self.cov[(o, o + 1)]);
        let (m, u) = (0.5 * (xx + pp), 0.5 * (xx - pp));
        out.cov[(o, o)] = m + u * second;
        out.cov[(o + 1, o + 1)] = m - u * second;
        out.cov[(o, o + 1)] = xp * second;
        out.cov[(o + 1, o)] = xp * second;
        for i in 0..2 {
            for j in 0..2 {
                out.cov[(o + i, other + j)] *= first;
                out.cov[(other + j, o + i)] *= first;
            }
        }
        out.mean[o] *= first;
        out.mean[o + 1] *= first;
        out
    }

    /// Moments of the state as seen through `detector` on both arms:
    /// loss, dark noise and phase jitter.
    pub fn detected(&self, detector: &DetectorModel) -> Result<Self> {
        detector.validate()?;
        let mut s = *self;
        for mode in [Mode::A, Mode::B] {
            s = s.dephase(mode, detector.phase_jitter_rad);
            s = s.apply_loss(mode, detector.efficiency)?;
            s = s.add_noise(mode, detector.dark_variance())?;
        }
        Ok(s)
    }

    /// `(ν₋, ν₊)`, normalized so the vacuum has both equal to 1.
    pub fn symplectic_eigenvalues(&self) -> (f64, f64) {
        let a = self.block(Mode::A, Mode::A).determinant();
        let b = self.block(Mode::B, Mode::B).determinant();
        let c = self.block(Mode::A, Mode::B).determinant();
        let delta = a + b + 2.0 * c;
        let det = self.cov.determinant();
        let disc = (delta * delta - 4.0 * det).max(0.0).sqrt();
        let hi2 = (delta + disc) / 2.0;
        ((det.max(0.0) / hi2).sqrt(), hi2.sqrt())
    }

    pub fn is_physical(&self) -> bool {
        Self::new(self.mean, self.cov).is_ok()
    }

    pub fn is_pure(&self) -> bool {
        let (lo, hi) = self.symplectic_eigenvalues();
        (lo - 1.0).abs() < PHYSICALITY_TOL && (hi - 1.0).abs() < PHYSICALITY_TOL
    }

    /// Joint moments of `(Q_a(θ_a), Q_b(θ_b))`.
    pub fn quadrature_moments(&self, theta_a: f64, theta_b: f64) -> QuadratureMoments {
        let ua = Vector2::new(theta_a.cos(), theta_a.sin());
        let ub = Vector2::new(theta_b.cos(), theta_b.sin());
        QuadratureMoments {
            mean_a: ua.dot(&self.mean.fixed_rows::<2>(0)),
            mean_b: ub.dot(&self.mean.fixed_rows::<2>(2)),
            var_a: (ua.transpose() * self.block(Mode::A, Mode::A) * ua)[0],
            var_b: (ub.transpose() * self.block(Mode::B, Mode::B) * ub)[0],
            cov_ab: (ua.transpose() * self.block(Mode::A, Mode::B) * ub)[0],
        }
    }

    /// Mean photon number of one mode, `¼⟨X² + P²⟩ − ½`.
    pub fn mean_photon_number(&self, mode: Mode) -> f64 {
        let o = mode.offset();
        let second = self.cov[(o, o)] + self.cov[(o + 1, o + 1)] + self.mean[o].powi(2) + self.mean[o + 1].powi(2);
        0.25 * second - 0.5
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn paper_squeezer() -> SqueezerSpec {
        SqueezerSpec::new(6.0, 8.5).unwrap()
    }

    #[test]
    fn squeezer_variances() {
        let vac = SingleModeState::squeezed(&SqueezerSpec::new(0.0, 0.0).unwrap()).unwrap();
        assert_eq!(*vac.cov(), Matrix2::identity());

        let s = SingleModeState::squeezed(&paper_squeezer()).unwrap();
        assert_relative_eq!(s.cov()[(0, 0)], 0.25119, epsilon = 1e-5);
        assert_relative_eq!(s.cov()[(1, 1)], 7.07946, epsilon = 1e-5);
        assert!(!paper_squeezer().is_pure());

        let weak = SqueezerSpec::new(0.8, 0.8).unwrap();
        let (vs, va) = weak.variances();
        assert_relative_eq!(vs, 0.83176, epsilon = 1e-5);
        assert_relative_eq!(va, 1.20226, epsilon = 1e-5);
        assert!(weak.is_pure());
    }

    #[test]
    fn unphysical_squeezer_rejected() {
        assert!(matches!(SqueezerSpec::new(6.0, 3.0), Err(Error::Unphysical(_))));
        assert!(SqueezerSpec::new(-1.0, 3.0).is_err());
    }

    #[test]
    fn rotation_properties() {
        let s = SingleModeState::squeezed(&paper_squeezer()).unwrap();
        let state = GaussianTwoModeState::product(&s, &SingleModeState::vacuum());
        assert_eq!(state.rotate(Mode::A, 0.0), state);

        let q = state.rotate(Mode::A, FRAC_PI_2);
        assert_relative_eq!(q.cov()[(0, 0)], s.cov()[(1, 1)], epsilon = 1e-12);
        assert_relative_eq!(q.cov()[(1, 1)], s.cov()[(0, 0)], epsilon = 1e-12);

        let twice = state.rotate(Mode::A, FRAC_PI_4).rotate(Mode::A, FRAC_PI_4);
        assert!((twice.cov() - q.cov()).abs().max() < 1e-12);
        let (lo, hi) = state.symplectic_eigenvalues();
        let (lo2, hi2) = twice.symplectic_eigenvalues();
        assert_relative_eq!(lo, lo2, epsilon = 1e-12);
        assert_relative_eq!(hi, hi2, epsilon = 1e-12);
    }

    #[test]
    fn beamsplitter_paper_squeezers() {
        let vac = GaussianTwoModeState::beamsplit_5050(&SingleModeState::vacuum(), &SingleModeState::vacuum());
        assert!((vac.cov() - Matrix4::identity()).abs().max() < 1e-15);
        let st = GaussianTwoModeState::entangled_pair(&paper_squeezer(), FRAC_PI_2).unwrap();
        let c = st.cov();
        assert_relative_eq!(c[(0, 0)], 3.66533, epsilon = 1e-5);
        assert_relative_eq!(c[(2, 2)], 3.66533, epsilon = 1e-5);
        assert_relative_eq!(c[(0, 2)], -3.41414, epsilon = 1e-5);
        assert_relative_eq!(c[(1, 3)], 3.41414, epsilon = 1e-5);
        assert!(st.is_physical());
    }

    #[test]
    fn beamsplit_of_pure_squeezers_is_tmss() {
        for r in [0.0, 0.05, 0.092, 0.5, 1.3] {
            let pair = GaussianTwoModeState::entangled_pair(&SqueezerSpec::pure(r), FRAC_PI_2).unwrap();
            let tmss = GaussianTwoModeState::tmss(r).unwrap();
            assert!((pair.cov() - tmss.cov()).abs().max() < 1e-12, "r = {r}");
        }
    }

    #[test]
    fn tmss_moments() {
        assert_eq!(*GaussianTwoModeState::tmss(0.0).unwrap().cov(), Matrix4::identity());
        let t = GaussianTwoModeState::tmss(0.5).unwrap();
        assert_relative_eq!(t.cov()[(0, 0)], 1.54308, epsilon = 1e-5);
        assert_relative_eq!(t.cov()[(0, 2)].abs(), 1.17520, epsilon = 1e-5);
        assert!(t.is_pure());
        for r in [0.1, 0.3, 0.8] {
            let t = GaussianTwoModeState::tmss(r).unwrap();
            let m = t.quadrature_moments(0.0, 0.0);
            assert_relative_eq!(m.var_a + m.var_b + 2.0 * m.cov_ab, 2.0 * (-2.0 * r).exp(), epsilon = 1e-12);
            assert_relative_eq!(t.mean_photon_number(Mode::A), r.sinh().powi(2), epsilon = 1e-12);
        }
        assert!(GaussianTwoModeState::tmss(-0.1).is_err());
    }

    #[test]
    fn loss() {
        let s = SingleModeState::squeezed(&paper_squeezer()).unwrap();
        assert_eq!(s.apply_loss(1.0).unwrap(), s);
        let l = s.apply_loss(0.95).unwrap();
        assert_relative_eq!(l.cov()[(0, 0)], 0.28863, epsilon = 1e-5);
        assert_relative_eq!(l.cov()[(1, 1)], 6.77549, epsilon = 1e-5);

        let st = GaussianTwoModeState::tmss(0.7).unwrap();
        let heavy = st.apply_loss(Mode::A, 1e-9).unwrap().apply_loss(Mode::B, 1e-9).unwrap();
        assert!((heavy.cov() - Matrix4::identity()).abs().max() < 1e-7);
        assert!(st.apply_loss(Mode::A, 0.0).is_err());
        assert!(st.apply_loss(Mode::A, 1.2).is_err());
    }

    #[test]
    fn dephasing_shrinks_correlations() {
        let t = GaussianTwoModeState::tmss(0.5).unwrap();
        let sigma = 0.03;
        let d = t.dephase(Mode::A, sigma).dephase(Mode::B, sigma);
        assert_relative_eq!(d.cov()[(0, 2)], t.cov()[(0, 2)] * (-sigma * sigma).exp(), epsilon = 1e-12);
        assert_relative_eq!(d.cov()[(0, 0)], t.cov()[(0, 0)], epsilon = 1e-12);
        assert!(d.is_physical());
    }

    #[test]
    fn unphysical_covariance_rejected() {
        let cov = Matrix4::identity() * 0.5;
        assert!(matches!(GaussianTwoModeState::new(Vector4::zeros(), cov), Err(Error::Unphysical(_))));
        let mut asym = Matrix4::identity();
        asym[(0, 1)] = 0.1;
        assert!(GaussianTwoModeState::new(Vector4::zeros(), asym).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_state() -> impl Strategy<Value = GaussianTwoModeState> {
            (0.0..10.0f64, 0.0..4.0f64, 0.0..6.3f64, 0.0..2.0f64).prop_map(|(sq, extra, phase, r)| {
                let spec = SqueezerSpec::new(sq, sq + extra).unwrap();
                let pair = GaussianTwoModeState::entangled_pair(&spec, phase).unwrap();
                let t = GaussianTwoModeState::tmss(r).unwrap();
                GaussianTwoModeState::new(pair.mean + t.mean, (pair.cov + t.cov) * 0.5).unwrap()
            })
        }

        proptest! {
            #[test]
            fn operations_preserve_physicality(
                st in arb_state(),
                phi in -7.0..7.0f64,
                eta in 0.01..1.0f64,
                noise in 0.0..0.5f64,
                jitter in 0.0..0.5f64,
            ) {
                let (lo0, hi0) = st.symplectic_eigenvalues();
                let rotated = st.rotate(Mode::B, phi);
                let (lo, hi) = rotated.symplectic_eigenvalues();
                prop_assert!((lo - lo0).abs() < 1e-8 * hi0 && (hi - hi0).abs() < 1e-8 * hi0);

                let lossy = rotated.apply_loss(Mode::A, eta).unwrap();
                prop_assert!(lossy.symplectic_eigenvalues().0 >= 1.0 - PHYSICALITY_TOL);
                prop_assert!(lossy.is_physical());
                let noisy = lossy.add_noise(Mode::B, noise).unwrap().dephase(Mode::A, jitter);
                prop_assert!(noisy.is_physical());
            }
        }
    }
}
