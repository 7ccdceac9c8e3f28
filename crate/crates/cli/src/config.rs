//! Run configuration, read from TOML. Unknown keys are rejected.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::path::Path;

use serde::{Deserialize, Serialize};
use twinbeam_core::tomography::{FilterSpec, GridSpec, OracleParams};
use twinbeam_core::{
    Binning, Calibration, DetectorModel, GaussianTwoModeState, LockedSettings, ScanPlan, SqueezerSpec,
};

use crate::error::{CliError, Result};

pub const DEFAULT_SEED: u64 = 2011;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub state: StateConfig,
    pub detector: DetectorConfig,
    pub run: RunSection,
    pub conditioning: ConditioningConfig,
    pub tomography: TomographyConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            state: StateConfig::default(),
            detector: DetectorConfig::default(),
            run: RunSection::default(),
            conditioning: ConditioningConfig::default(),
            tomography: TomographyConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    /// Two squeezed beams combined on a 50:50 beamsplitter.
    Squeezers,
    /// Pure two-mode squeezed vacuum.
    Tmss,
    Vacuum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StateConfig {
    pub kind: StateKind,
    pub squeeze_db: f64,
    pub antisqueeze_db: f64,
    /// Phase between the two squeezed inputs, radians.
    pub relative_phase: f64,
    /// Squeezing parameter for `kind = "tmss"`.
    pub r: f64,
}

impl Default for StateConfig {
    fn default() -> Self {
        Self { kind: StateKind::Squeezers, squeeze_db: 6.0, antisqueeze_db: 8.5, relative_phase: FRAC_PI_2, r: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectorConfig {
    pub efficiency: f64,
    /// Shot-noise clearance over electronic noise in dB; `inf` disables dark noise.
    pub dark_clearance_db: f64,
    pub phase_jitter_rad: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self { efficiency: 0.95, dark_clearance_db: 20.0, phase_jitter_rad: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleKind {
    /// Locked `(X, X)` and `(P, P)` blocks for the entanglement criteria.
    Locked,
    /// Slow `θ_a` steps with a fast `θ_b` sweep, for heralding.
    Scan,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub schedule: ScheduleKind,
    pub samples_per_setting: usize,
    pub histogram_count: usize,
    pub samples_per_histogram: usize,
    pub theta_b_periods_per_histogram: usize,
    pub theta_a_range: f64,
}

impl Default for RunSection {
    fn default() -> Self {
        let plan = ScanPlan::default();
        Self {
            schedule: ScheduleKind::Locked,
            samples_per_setting: 500_000,
            histogram_count: plan.histogram_count,
            samples_per_histogram: plan.samples_per_histogram,
            theta_b_periods_per_histogram: plan.theta_b_periods_per_histogram,
            theta_a_range: 3.0 * TAU,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConditioningConfig {
    pub bins: usize,
    pub q_max: f64,
    /// Constant subtracted from `q_b²`. When absent, the vacuum level of the
    /// configured detector, `1 + V_dark`, as a blocked-signal calibration would measure.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibration: Option<f64>,
}

impl Default for ConditioningConfig {
    fn default() -> Self {
        let b = Binning::default();
        Self { bins: b.bins, q_max: b.q_max, calibration: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TomographyConfig {
    pub n_max: usize,
    pub grid_extent: f64,
    pub grid_points: usize,
    pub cutoff: f64,
    pub taper: f64,
}

impl Default for TomographyConfig {
    fn default() -> Self {
        let (g, f) = (GridSpec::default(), FilterSpec::default());
        Self { n_max: 6, grid_extent: g.extent, grid_points: g.points, cutoff: f.cutoff, taper: f.taper }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// Field-level checks; building every derived object runs the core validation.
    pub fn validate(&self) -> Result<()> {
        let field = |name: &str, e: twinbeam_core::Error| CliError::Config(format!("{name}: {e}"));
        self.state().map_err(|e| field("state", e))?;
        self.detector().map_err(|e| field("detector", e))?;
        if self.run.samples_per_setting == 0 {
            return Err(CliError::Config("run.samples_per_setting: must be at least 1".into()));
        }
        self.scan_plan().map_err(|e| field("run", e))?;
        self.binning().map_err(|e| field("conditioning", e))?;
        if self.conditioning.calibration.is_some_and(|c| !c.is_finite()) {
            return Err(CliError::Config("conditioning.calibration: must be finite".into()));
        }
        self.grid().validate().map_err(|e| field("tomography", e))?;
        if self.tomography.cutoff.is_nan() || self.tomography.cutoff <= 0.0 || !(0.0..=1.0).contains(&self.tomography.taper) {
            return Err(CliError::Config("tomography: cutoff must be positive and taper in [0, 1]".into()));
        }
        if self.tomography.n_max > twinbeam_core::tomography::MAX_PATTERN_ORDER {
            return Err(CliError::Config(format!(
                "tomography.n_max: {} exceeds {}",
                self.tomography.n_max,
                twinbeam_core::tomography::MAX_PATTERN_ORDER
            )));
        }
        Ok(())
    }

    pub fn state(&self) -> twinbeam_core::Result<GaussianTwoModeState> {
        let s = &self.state;
        match s.kind {
            StateKind::Squeezers => {
                let spec = SqueezerSpec::new(s.squeeze_db, s.antisqueeze_db)?;
                GaussianTwoModeState::entangled_pair(&spec, s.relative_phase)
            }
            StateKind::Tmss => GaussianTwoModeState::tmss(s.r),
            StateKind::Vacuum => Ok(GaussianTwoModeState::vacuum()),
        }
    }

    pub fn detector(&self) -> twinbeam_core::Result<DetectorModel> {
        let d = &self.detector;
        DetectorModel::new(d.efficiency, d.dark_clearance_db, d.phase_jitter_rad)
    }

    pub fn locked(&self) -> LockedSettings {
        LockedSettings::criteria(self.run.samples_per_setting)
    }

    pub fn scan_plan(&self) -> twinbeam_core::Result<ScanPlan> {
        let r = &self.run;
        ScanPlan::new(r.histogram_count, r.samples_per_histogram, r.theta_b_periods_per_histogram, r.theta_a_range)
    }

    pub fn binning(&self) -> twinbeam_core::Result<Binning> {
        Binning::new(self.conditioning.bins, self.conditioning.q_max)
    }

    pub fn calibration_constant(&self) -> f64 {
        self.conditioning
            .calibration
            .unwrap_or_else(|| 1.0 + self.detector().map_or(0.0, |d| d.dark_variance()))
    }

    pub fn calibration(&self) -> Calibration {
        match self.calibration_constant() {
            1.0 => Calibration::Unit,
            c => Calibration::Measured(c),
        }
    }

    pub fn grid(&self) -> GridSpec {
        GridSpec { extent: self.tomography.grid_extent, points: self.tomography.grid_points }
    }

    pub fn filter(&self) -> FilterSpec {
        FilterSpec { cutoff: self.tomography.cutoff, taper: self.tomography.taper }
    }

    /// Squeezing parameter of the equivalent two-mode squeezed vacuum, when
    /// the configured state is one.
    pub fn tmss_parameter(&self) -> Option<f64> {
        let s = &self.state;
        match s.kind {
            StateKind::Tmss => Some(s.r),
            StateKind::Vacuum => Some(0.0),
            StateKind::Squeezers => {
                let symmetric = (s.squeeze_db - s.antisqueeze_db).abs() < 1e-9;
                let quadrature = (s.relative_phase - FRAC_PI_2).abs() < 1e-12;
                (symmetric && quadrature).then(|| s.squeeze_db * std::f64::consts::LN_10 / 20.0)
            }
        }
    }

    pub fn oracle_params(&self) -> Option<OracleParams> {
        let detector = self.detector().ok()?;
        Some(OracleParams {
            r: self.tmss_parameter()?,
            eta_a: detector.efficiency,
            eta_b: detector.efficiency,
            dark_variance: detector.dark_variance(),
            calibration: self.calibration_constant(),
        })
    }
}
