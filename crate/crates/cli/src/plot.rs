//! Static SVG figures: quadrature histograms, Wigner maps and Fock bar charts.

use std::fmt::Write as _;

use twinbeam_core::tomography::FockReport;
use twinbeam_core::{QuadratureDensity, WignerGrid};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;

/// A rectangular plotting area with linear axes.
struct Panel {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    x_range: (f64, f64),
    y_range: (f64, f64),
}

impl Panel {
    fn new(x_range: (f64, f64), y_range: (f64, f64)) -> Self {
        Self { x0: MARGIN, y0: 24.0, w: WIDTH - MARGIN - 16.0, h: HEIGHT - MARGIN - 24.0, x_range, y_range }
    }

    fn px(&self, x: f64) -> f64 {
        self.x0 + (x - self.x_range.0) / (self.x_range.1 - self.x_range.0) * self.w
    }

    fn py(&self, y: f64) -> f64 {
        self.y0 + self.h - (y - self.y_range.0) / (self.y_range.1 - self.y_range.0) * self.h
    }

    fn axes(&self, s: &mut String, x_label: &str, y_label: &str) {
        let (bx, by) = (self.y0 + self.h, self.x0);
        let _ = writeln!(
            s,
            r##"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#333"/>"##,
            self.x0, self.y0, self.w, self.h
        );
        for t in ticks(self.x_range) {
            let x = self.px(t);
            let _ = writeln!(s, r##"<line x1="{x:.1}" y1="{bx:.1}" x2="{x:.1}" y2="{:.1}" stroke="#333"/>"##, bx + 4.0);
            let _ = writeln!(s, r#"<text x="{x:.1}" y="{:.1}" font-size="11" text-anchor="middle">{}</text>"#, bx + 16.0, fmt_tick(t));
        }
        for t in ticks(self.y_range) {
            let y = self.py(t);
            let _ = writeln!(s, r##"<line x1="{:.1}" y1="{y:.1}" x2="{by:.1}" y2="{y:.1}" stroke="#333"/>"##, by - 4.0);
            let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{}</text>"#, by - 6.0, y + 4.0, fmt_tick(t));
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">{x_label}</text>"#,
            self.x0 + self.w / 2.0,
            HEIGHT - 12.0
        );
        let _ = writeln!(
            s,
            r#"<text x="14" y="{:.1}" font-size="13" text-anchor="middle" transform="rotate(-90 14 {:.1})">{y_label}</text>"#,
            self.y0 + self.h / 2.0,
            self.y0 + self.h / 2.0
        );
    }

    fn polyline(&self, s: &mut String, points: impl Iterator<Item = (f64, f64)>, style: &str) {
        let pts: Vec<String> = points.map(|(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y))).collect();
        let _ = writeln!(s, r#"<polyline fill="none" {style} points="{}"/>"#, pts.join(" "));
    }
}

fn ticks((lo, hi): (f64, f64)) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn fmt_tick(t: f64) -> String {
    let s = format!("{:.3}", t);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn document(body: &str, title: &str) -> String {
    format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">
<title>{title}</title>
<rect width="100%" height="100%" fill="white"/>
{body}</svg>
"#
    )
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    let pad = 0.05 * (hi - lo).max(1e-12);
    (lo - pad, hi + pad)
}

/// Per-phase conditioned densities in grey over the pooled density.
pub fn histogram_overlay(segments: &[QuadratureDensity], pooled: &QuadratureDensity, reference: Option<&dyn Fn(f64) -> f64>) -> String {
    let all = segments.iter().chain(std::iter::once(pooled));
    let (lo, hi) = all.flat_map(|d| d.values.iter().copied()).fold((0.0f64, 0.0f64), |(a, b), v| (a.min(v), b.max(v)));
    let q_range = (pooled.q_min, pooled.q_min + pooled.width * pooled.values.len() as f64);
    let panel = Panel::new(q_range, padded(lo, hi));
    let mut s = String::new();
    panel.axes(&mut s, "quadrature q", "conditioned density");
    for d in segments {
        panel.polyline(&mut s, d.centers().zip(d.values.iter().copied()), r##"stroke="#9a9a9a" stroke-width="0.7""##);
    }
    panel.polyline(&mut s, pooled.centers().zip(pooled.values.iter().copied()), r##"stroke="#c0392b" stroke-width="2""##);
    if let Some(f) = reference {
        let n = 400;
        let pts = (0..=n).map(|i| {
            let q = q_range.0 + (q_range.1 - q_range.0) * i as f64 / n as f64;
            (q, f(q))
        });
        panel.polyline(&mut s, pts, r##"stroke="#1f4e8c" stroke-width="1.5" stroke-dasharray="5,3""##);
    }
    document(&s, "Conditioned quadrature densities")
}

fn diverging(v: f64, scale: f64) -> String {
    let t = (v / scale).clamp(-1.0, 1.0);
    let (r, g, b) = if t >= 0.0 {
        (255.0, 255.0 * (1.0 - t), 255.0 * (1.0 - t))
    } else {
        (255.0 * (1.0 + t), 255.0 * (1.0 + t), 255.0)
    };
    format!("#{:02x}{:02x}{:02x}", r as u8, g as u8, b as u8)
}

/// Colour map of `W(x, p)` (red positive, blue negative) beside the slice `W(x, 0)`.
pub fn wigner_map(grid: &WignerGrid) -> String {
    let scale = grid.values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-12);
    let (nx, np) = (grid.x_axis.len(), grid.p_axis.len());
    let x_range = (grid.x_axis[0], grid.x_axis[nx - 1]);
    let p_range = (grid.p_axis[0], grid.p_axis[np - 1]);
    let mut panel = Panel::new(x_range, p_range);
    panel.w = panel.h;
    let (cw, ch) = (panel.w / (nx - 1) as f64, panel.h / (np - 1) as f64);
    let mut s = String::new();
    for ip in 0..np {
        for ix in 0..nx {
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                panel.px(grid.x_axis[ix]) - cw / 2.0,
                panel.py(grid.p_axis[ip]) - ch / 2.0,
                cw + 0.05,
                ch + 0.05,
                diverging(grid.value(ix, ip), scale)
            );
        }
    }
    panel.axes(&mut s, "x", "p");

    // W(x, 0) slice to the right of the map
    let slice = Panel {
        x0: panel.x0 + panel.w + 40.0,
        y0: panel.y0,
        w: WIDTH - (panel.x0 + panel.w + 40.0) - 12.0,
        h: panel.h,
        x_range,
        y_range: padded(-scale, scale),
    };
    let mid = np / 2;
    let _ = writeln!(
        s,
        r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#bbb"/>"##,
        slice.x0,
        slice.py(0.0),
        slice.x0 + slice.w,
        slice.py(0.0)
    );
    slice.polyline(&mut s, (0..nx).map(|ix| (grid.x_axis[ix], grid.value(ix, mid))), r##"stroke="#c0392b" stroke-width="1.5""##);
    let _ = writeln!(
        s,
        r##"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#333"/>"##,
        slice.x0, slice.y0, slice.w, slice.h
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">W(x, p = {:.2}), min {:.4}</text>"#,
        slice.x0 + slice.w / 2.0,
        HEIGHT - 12.0,
        grid.p_axis[mid],
        grid.min()
    );
    document(&s, "Wigner function")
}

/// Raw photon-number probabilities with error bars, and loss-corrected values in grey.
pub fn fock_bars(report: &FockReport) -> String {
    let raw = &report.raw.probabilities;
    let corrected = report.corrected.as_ref().map(|(_, c)| &c.probabilities);
    let values = raw.iter().chain(corrected.into_iter().flatten());
    let (lo, hi) = values.fold((0.0f64, 0.0f64), |(a, b), v| (a.min(*v), b.max(*v)));
    let n = raw.len() as f64;
    let panel = Panel::new((-0.5, n - 0.5), padded(lo, hi.max(1.0)));
    let mut s = String::new();
    let bar = 0.35;
    for (k, p) in raw.iter().enumerate() {
        let x = k as f64;
        let (top, bottom) = (panel.py(p.max(0.0)), panel.py(p.min(0.0)));
        let offset = if corrected.is_some() { -bar } else { -bar / 2.0 };
        let _ = writeln!(
            s,
            r##"<rect x="{:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="#1f4e8c"/>"##,
            panel.px(x + offset),
            panel.px(x + bar) - panel.px(x),
            bottom - top
        );
        if let Some(se) = report.standard_errors.as_ref().map(|e| e[k]) {
            let cx = panel.px(x + offset + bar / 2.0);
            let _ = writeln!(s, r##"<line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="#111"/>"##, panel.py(p - se), panel.py(p + se));
        }
        if let Some(c) = corrected {
            let (top, bottom) = (panel.py(c[k].max(0.0)), panel.py(c[k].min(0.0)));
            let _ = writeln!(
                s,
                r##"<rect x="{:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="#a0a0a0"/>"##,
                panel.px(x),
                panel.px(x + bar) - panel.px(x),
                bottom - top
            );
        }
    }
    let _ = writeln!(
        s,
        r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#333"/>"##,
        panel.x0,
        panel.py(0.0),
        panel.x0 + panel.w,
        panel.py(0.0)
    );
    panel.axes(&mut s, "photon number n", "probability");
    document(&s, "Photon number distribution")
}

#[cfg(test)]
mod tests {
    use super::*;
    use twinbeam_core::FockDiagonal;

    #[test]
    fn tick_selection() {
        assert_eq!(ticks((0.0, 1.0)), vec![0.0, 0.2, 0.4, 0.6000000000000001, 0.8, 1.0]);
        assert_eq!(fmt_tick(-0.0), "0");
        assert_eq!(fmt_tick(2.5), "2.5");
    }

    #[test]
    fn documents_are_well_formed() {
        let report = FockReport {
            raw: FockDiagonal::new(vec![0.1, 0.8, 0.1]),
            standard_errors: Some(vec![0.01; 3]),
            corrected: Some((0.9, FockDiagonal::new(vec![0.0, 0.9, 0.1]))),
        };
        let svg = fock_bars(&report);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<rect").count(), 1 + 6 + 1);

        let d = QuadratureDensity::from_fn(-3.0, 3.0, 30, |q| (-q * q / 2.0).exp());
        let svg = histogram_overlay(&[d.clone(), d.clone()], &d, Some(&|q: f64| q * q));
        assert_eq!(svg.matches("<polyline").count(), 4);
    }
}
