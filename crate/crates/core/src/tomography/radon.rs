//! Wigner function by filtered backprojection.
//!
//! `W(x, p) = ∫_0^π dθ ∫ dq pr(q, θ) K(x cos θ + p sin θ − q)` with the ramp
//! kernel `K(t) = (1/2π²) ∫_0^{k_c} k A(k) cos(kt) dk`. `A` is 1 up to
//! `(1 − taper)·k_c` and rolls off to 0 at `k_c` with a raised cosine.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::conditioning::QuadratureDensity;
use crate::{Error, Result};

pub const MIN_POINTS_PER_UNIT: f64 = 8.0;
pub const MIN_PROJECTIONS: usize = 12;
/// Sampling step of filtered projections and radial profiles.
const TABLE_STEP: f64 = 2e-3;
const SYMMETRIC_ANGLES: usize = 720;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    /// Hard frequency cutoff `k_c` in inverse quadrature units.
    pub cutoff: f64,
    /// Fraction of `[0, k_c]` covered by the cosine roll-off.
    pub taper: f64,
}

impl Default for FilterSpec {
    fn default() -> Self {
        Self { cutoff: 4.0, taper: 0.05 }
    }
}

impl FilterSpec {
    fn validate(&self) -> Result<()> {
        if !(self.cutoff > 0.0 && self.cutoff.is_finite()) {
            return Err(Error::invalid("cutoff", "must be positive and finite"));
        }
        if !(0.0..=1.0).contains(&self.taper) {
            return Err(Error::invalid("taper", "must lie in [0, 1]"));
        }
        Ok(())
    }

    /// `K(t)`.
    pub fn kernel(&self, t: f64) -> f64 {
        let k1 = self.cutoff * (1.0 - self.taper);
        let flat = if t.abs() < 1e-4 {
            0.5 * k1 * k1 - k1.powi(4) * t * t / 8.0
        } else {
            ((k1 * t).cos() - 1.0) / (t * t) + k1 * (k1 * t).sin() / t
        };
        let width = self.cutoff - k1;
        let rolloff = if width > 0.0 {
            // Simpson on the roll-off interval
            let n = 64;
            let h = width / n as f64;
            (0..=n)
                .map(|i| {
                    let k = k1 + i as f64 * h;
                    let a = 0.5 * (1.0 + (PI * (k - k1) / width).cos());
                    let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                    w * k * a * (k * t).cos()
                })
                .sum::<f64>()
                * h
                / 3.0
        } else {
            0.0
        };
        (flat + rolloff) / (2.0 * PI * PI)
    }
}

/// Square `(x, p)` grid over `[−extent, extent]²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub extent: f64,
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { extent: 5.0, points: 101 }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.extent > 0.0 && self.extent.is_finite()) || self.points < 2 {
            return Err(Error::invalid("grid", "needs a positive extent and at least 2 points"));
        }
        let density = (self.points - 1) as f64 / (2.0 * self.extent);
        if density < MIN_POINTS_PER_UNIT {
            return Err(Error::invalid(
                "grid",
                format!("{density:.2} points per unit is coarser than {MIN_POINTS_PER_UNIT}"),
            ));
        }
        Ok(())
    }

    pub fn axis(&self) -> Vec<f64> {
        let h = 2.0 * self.extent / (self.points - 1) as f64;
        (0..self.points).map(|i| -self.extent + i as f64 * h).collect()
    }
}

/// Wigner function values on a rectangular grid, row-major in `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub x_axis: Vec<f64>,
    pub p_axis: Vec<f64>,
    pub values: Vec<f64>,
}

impl WignerGrid {
    pub fn value(&self, ix: usize, ip: usize) -> f64 {
        self.values[ip * self.x_axis.len() + ix]
    }

    /// Bilinear interpolation.
    pub fn at(&self, x: f64, p: f64) -> f64 {
        let locate = |axis: &[f64], v: f64| {
            let h = axis[1] - axis[0];
            let t = ((v - axis[0]) / h).clamp(0.0, (axis.len() - 1) as f64 - 1e-9);
            let i = t as usize;
            (i, t - i as f64)
        };
        let (ix, fx) = locate(&self.x_axis, x);
        let (ip, fp) = locate(&self.p_axis, p);
        let v = |i, j| self.value(i, j);
        (1.0 - fx) * (1.0 - fp) * v(ix, ip)
            + fx * (1.0 - fp) * v(ix + 1, ip)
            + (1.0 - fx) * fp * v(ix, ip + 1)
            + fx * fp * v(ix + 1, ip + 1)
    }

    /// Trapezoidal integral over the grid.
    pub fn integral(&self) -> f64 {
        let hx = self.x_axis[1] - self.x_axis[0];
        let hp = self.p_axis[1] - self.p_axis[0];
        let (nx, np) = (self.x_axis.len(), self.p_axis.len());
        let edge = |i: usize, n: usize| if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        let mut sum = 0.0;
        for ip in 0..np {
            for ix in 0..nx {
                sum += edge(ix, nx) * edge(ip, np) * self.value(ix, ip);
            }
        }
        sum * hx * hp
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `x,p,value` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,p,value\n");
        for (ip, p) in self.p_axis.iter().enumerate() {
            for (ix, x) in self.x_axis.iter().enumerate() {
                let _ = writeln!(s, "{x},{p},{}", self.value(ix, ip));
            }
        }
        s
    }

    /// Inverse of [`Self::to_csv`]. Rows must enumerate `x` fastest.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse { path: "<wigner>".into(), line, message };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.trim() == "x,p,value" => {}
            _ => return Err(err(1, "expected header `x,p,value`".into())),
        }
        let mut rows = Vec::new();
        for (i, line) in lines {
            let f: Vec<f64> = line
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| err(i + 1, e.to_string()))?;
            if f.len() != 3 {
                return Err(err(i + 1, format!("expected 3 fields, found {}", f.len())));
            }
            rows.push((f[0], f[1], f[2]));
        }
        let p0 = rows.first().ok_or_else(|| err(2, "no grid rows".into()))?.1;
        let nx = rows.iter().take_while(|r| r.1 == p0).count();
        if nx < 2 || rows.len() % nx != 0 || rows.len() / nx < 2 {
            return Err(err(2, "rows do not form a rectangular grid".into()));
        }
        let x_axis: Vec<f64> = rows[..nx].iter().map(|r| r.0).collect();
        let p_axis: Vec<f64> = rows.iter().step_by(nx).map(|r| r.1).collect();
        for (k, r) in rows.iter().enumerate() {
            if r.0 != x_axis[k % nx] || r.1 != p_axis[k / nx] {
                return Err(err(k + 2, "row breaks the grid ordering".into()));
            }
        }
        Ok(Self { x_axis, p_axis, values: rows.iter().map(|r| r.2).collect() })
    }

    /// Axis metadata followed by one whitespace-separated row per `p` value.
    pub fn to_matrix_text(&self) -> String {
        let mut s = String::from("# twinbeam wigner grid\n");
        let _ = writeln!(s, "x_min = {}\nx_max = {}\nx_points = {}", self.x_axis[0], self.x_axis[self.x_axis.len() - 1], self.x_axis.len());
        let _ = writeln!(s, "p_min = {}\np_max = {}\np_points = {}", self.p_axis[0], self.p_axis[self.p_axis.len() - 1], self.p_axis.len());
        for row in self.values.chunks(self.x_axis.len()) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:.9e}")).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }
}

/// A filtered projection tabulated on `t ∈ [−t_max, t_max]`.
struct FilteredProjection {
    t_max: f64,
    values: Vec<f64>,
}

impl FilteredProjection {
    fn new(density: &QuadratureDensity, filter: &FilterSpec, t_max: f64) -> Self {
        let n = (2.0 * t_max / TABLE_STEP).ceil() as usize + 1;
        let support: Vec<(f64, f64)> = density
            .centers()
            .zip(&density.values)
            .filter(|(_, v)| **v != 0.0)
            .map(|(q, v)| (q, v * density.width))
            .collect();
        // K is even and evaluated on a lattice of differences; tabulate it once.
        let q_span = support.iter().map(|(q, _)| q.abs()).fold(0.0, f64::max);
        let kernel_step = TABLE_STEP / 4.0;
        let kernel_len = ((t_max + q_span) / kernel_step).ceil() as usize + 2;
        let kernel: Vec<f64> = (0..kernel_len).map(|i| filter.kernel(i as f64 * kernel_step)).collect();
        let k_at = |t: f64| {
            let u = t.abs() / kernel_step;
            let i = (u as usize).min(kernel_len - 2);
            let f = u - i as f64;
            (1.0 - f) * kernel[i] + f * kernel[i + 1]
        };
        let values = (0..n)
            .map(|i| {
                let t = -t_max + i as f64 * TABLE_STEP;
                support.iter().map(|&(q, m)| m * k_at(t - q)).sum()
            })
            .collect();
        Self { t_max, values }
    }

    fn at(&self, t: f64) -> f64 {
        let u = ((t + self.t_max) / TABLE_STEP).clamp(0.0, (self.values.len() - 1) as f64 - 1e-9);
        let i = u as usize;
        let f = u - i as f64;
        (1.0 - f) * self.values[i] + f * self.values[i + 1]
    }
}

fn reach(grid: &GridSpec) -> f64 {
    grid.extent * std::f64::consts::SQRT_2 + 4.0 * TABLE_STEP
}

/// Backprojection for a phase-independent state: every projection equals
/// the pooled density (symmetrized in `q`), and `W` depends only on the radius.
pub fn inverse_radon_symmetric(density: &QuadratureDensity, grid: &GridSpec, filter: &FilterSpec) -> Result<WignerGrid> {
    grid.validate()?;
    filter.validate()?;
    let r_max = reach(grid);
    let projection = FilteredProjection::new(&density.symmetrized(), filter, r_max);
    let radial_n = (r_max / TABLE_STEP).ceil() as usize + 2;
    let dpsi = PI / SYMMETRIC_ANGLES as f64;
    let cosines: Vec<f64> = (0..SYMMETRIC_ANGLES).map(|k| ((k as f64 + 0.5) * dpsi).cos()).collect();
    let radial: Vec<f64> = (0..radial_n)
        .map(|i| {
            let rho = i as f64 * TABLE_STEP;
            cosines.iter().map(|c| projection.at(rho * c)).sum::<f64>() * dpsi
        })
        .collect();
    let axis = grid.axis();
    let mut values = Vec::with_capacity(axis.len() * axis.len());
    for p in &axis {
        for x in &axis {
            let u = x.hypot(*p) / TABLE_STEP;
            let i = (u as usize).min(radial_n - 2);
            let f = u - i as f64;
            values.push((1.0 - f) * radial[i] + f * radial[i + 1]);
        }
    }
    Ok(WignerGrid { x_axis: axis.clone(), p_axis: axis, values })
}

/// General backprojection from densities at equally spaced phases covering
/// `[0, π)` or `[0, 2π)`.
pub fn inverse_radon(projections: &[(f64, QuadratureDensity)], grid: &GridSpec, filter: &FilterSpec) -> Result<WignerGrid> {
    grid.validate()?;
    filter.validate()?;
    if projections.len() < MIN_PROJECTIONS {
        return Err(Error::IncompleteData(format!(
            "{} projection phases, need at least {MIN_PROJECTIONS}",
            projections.len()
        )));
    }
    let r_max = reach(grid);
    let filtered: Vec<(f64, f64, FilteredProjection)> = projections
        .iter()
        .map(|(theta, d)| (theta.cos(), theta.sin(), FilteredProjection::new(d, filter, r_max)))
        .collect();
    let weight = PI / projections.len() as f64;
    let axis = grid.axis();
    let mut values = Vec::with_capacity(axis.len() * axis.len());
    for p in &axis {
        for x in &axis {
            values.push(filtered.iter().map(|(c, s, g)| g.at(x * c + p * s)).sum::<f64>() * weight);
        }
    }
    Ok(WignerGrid { x_axis: axis.clone(), p_axis: axis, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tomography::fock::fock_pdf;

    const VACUUM_W0: f64 = 1.0 / (2.0 * PI);

    fn analytic(n: usize) -> QuadratureDensity {
        QuadratureDensity::from_fn(-12.0, 12.0, 2001, |q| fock_pdf(n, q).unwrap())
    }

    #[test]
    fn vacuum_origin_value() {
        let w = inverse_radon_symmetric(&analytic(0), &GridSpec::default(), &FilterSpec::default()).unwrap();
        assert!((w.at(0.0, 0.0) - VACUUM_W0).abs() < 0.02 * VACUUM_W0, "{}", w.at(0.0, 0.0));
        assert!((w.integral() - 1.0).abs() < 0.01);
    }

    #[test]
    fn single_photon_negativity_and_node() {
        let w = inverse_radon_symmetric(&analytic(1), &GridSpec::default(), &FilterSpec::default()).unwrap();
        assert!((w.at(0.0, 0.0) + VACUUM_W0).abs() < 0.01 * VACUUM_W0, "{}", w.at(0.0, 0.0));
        // W_1 changes sign at x² + p² = 1
        let h = 0.1;
        assert!(w.at(1.0 - h, 0.0) < 0.0 && w.at(1.0 + h, 0.0) > 0.0);
        assert!(w.at(0.0, 1.0 - h) < 0.0 && w.at(0.0, 1.0 + h) > 0.0);
        for r in [0.5, 1.5, 2.5] {
            let exact = (r * r - 1.0) * (-r * r / 2.0f64).exp() / (2.0 * PI);
            assert!((w.at(r, 0.0) - exact).abs() < 0.005, "r={r}: {} vs {exact}", w.at(r, 0.0));
        }
    }

    #[test]
    fn general_path_matches_symmetric_path() {
        let d = analytic(1);
        let projections: Vec<_> = (0..12).map(|k| (k as f64 * PI / 12.0, d.clone())).collect();
        let grid = GridSpec { extent: 3.0, points: 49 };
        let general = inverse_radon(&projections, &grid, &FilterSpec::default()).unwrap();
        let sym = inverse_radon_symmetric(&d, &grid, &FilterSpec::default()).unwrap();
        assert!((general.at(0.0, 0.0) - sym.at(0.0, 0.0)).abs() < 1e-3);
        assert!(inverse_radon(&projections[..11], &grid, &FilterSpec::default()).is_err());
    }

    #[test]
    fn general_path_resolves_squeezing() {
        // Squeezed vacuum: Var X = 0.5, Var P = 2; projections at 24 phases.
        let (vx, vp) = (0.5f64, 2.0f64);
        let projections: Vec<_> = (0..24)
            .map(|k| {
                let th = k as f64 * PI / 24.0;
                let v = vx * th.cos().powi(2) + vp * th.sin().powi(2);
                (th, QuadratureDensity::from_fn(-12.0, 12.0, 2001, |q| (-q * q / (2.0 * v)).exp() / (2.0 * PI * v).sqrt()))
            })
            .collect();
        let w = inverse_radon(&projections, &GridSpec::default(), &FilterSpec::default()).unwrap();
        let exact = |x: f64, p: f64| (-x * x / (2.0 * vx) - p * p / (2.0 * vp)).exp() / (2.0 * PI * (vx * vp).sqrt());
        for (x, p) in [(0.0, 0.0), (0.5, 0.0), (0.0, 1.0)] {
            assert!((w.at(x, p) - exact(x, p)).abs() < 0.01 * exact(0.0, 0.0), "({x},{p})");
        }
    }

    #[test]
    fn coarse_grid_rejected() {
        let g = GridSpec { extent: 5.0, points: 60 };
        assert!(inverse_radon_symmetric(&analytic(0), &g, &FilterSpec::default()).is_err());
    }

    #[test]
    fn exports() {
        let w = inverse_radon_symmetric(&analytic(0), &GridSpec { extent: 1.0, points: 17 }, &FilterSpec::default()).unwrap();
        assert_eq!(w.to_csv().lines().count(), 1 + 17 * 17);
        assert_eq!(WignerGrid::parse_csv(&w.to_csv()).unwrap(), w);
        assert!(WignerGrid::parse_csv("x,p,value\n0,0,1\n").is_err());
        assert_eq!(w.to_matrix_text().lines().count(), 7 + 17);
    }
}
