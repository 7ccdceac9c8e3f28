//! Desk-scale model of an entangled twin-beam homodyne experiment.
//!
//! The crate covers the whole chain:
//!
//! - [`gaussian`]: two-mode Gaussian states (squeezers, 50:50 beamsplitter,
//!   loss, dark noise, phase jitter) and reproducible joint homodyne sampling.
//! - [`criteria`]: Duan inseparability and Reid–Drummond EPR values, both
//!   analytic and estimated from records.
//! - [`acquisition`]: the phase-scanning measurement protocol and the record
//!   file formats.
//! - [`conditioning`]: photon-counter-free heralding by weighting each
//!   `q_a` sample with `q_b² − 1`.
//! - [`tomography`]: Fock wavefunctions, pattern functions, filtered
//!   backprojection, loss correction and the exact truncated-Fock oracle.
//!
//! Quadratures follow a single convention everywhere: `X = a + a†`,
//! `P = −i(a − a†)`, so the vacuum variance is exactly 1 and
//! `n̂ + ½ = ¼(X̂² + P̂²)`.

pub mod acquisition;
pub mod conditioning;
pub mod criteria;
mod error;
pub mod gaussian;
pub mod rng;
pub mod tomography;

pub use acquisition::{LockedSettings, QuadratureRecord, RecordFormat, ScanPlan, Schedule};
pub use conditioning::{Calibration, Binning, QuadratureDensity, WeightedHistogram};
pub use criteria::CriteriaReport;
pub use error::{Error, Result};
pub use gaussian::{DetectorModel, GaussianTwoModeState, Mode, SingleModeState, SqueezerSpec};
pub use tomography::{FockDiagonal, WignerGrid};

/// Vacuum quadrature variance in the convention used throughout the crate.
pub const VACUUM_VARIANCE: f64 = 1.0;
