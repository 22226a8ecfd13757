use std::fmt::Write as _;

use crate::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 64.0;

#[derive(Clone, Debug, PartialEq)]
pub enum PlotData {
    /// Points in the complex plane, with optional lattice crosses.
    Scatter { points: Vec<(f64, f64)>, lattice: Vec<(f64, f64)> },
    /// Step curve N(r).
    Curve { radii: Vec<f64>, counts: Vec<u64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Style {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
}

impl Style {
    pub fn spectrum(title: &str) -> Self {
        Self { title: title.into(), x_label: "Re lambda".into(), y_label: "Im lambda".into() }
    }

    pub fn counting(title: &str) -> Self {
        Self { title: title.into(), x_label: "r".into(), y_label: "N(r)".into() }
    }
}

struct Axis {
    lo: f64,
    hi: f64,
}

impl Axis {
    fn fit(vals: impl Iterator<Item = f64>) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in vals {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !(hi > lo) {
            lo -= 1.0;
            hi += 1.0;
        }
        let pad = 0.05 * (hi - lo);
        Self { lo: lo - pad, hi: hi + pad }
    }

    fn map(&self, v: f64, a: f64, b: f64) -> f64 {
        a + (v - self.lo) / (self.hi - self.lo) * (b - a)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

/// Standalone SVG with labeled axes. Output depends only on the input.
pub fn emit_svg(data: &PlotData, style: &Style) -> Result<String> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = match data {
        PlotData::Scatter { points, lattice } => {
            if points.is_empty() && lattice.is_empty() {
                return Err(Error::InsufficientData("nothing to plot".into()));
            }
            points.iter().chain(lattice).cloned().unzip()
        }
        PlotData::Curve { radii, counts } => {
            if radii.is_empty() || radii.len() != counts.len() {
                return Err(Error::InsufficientData("nothing to plot".into()));
            }
            (radii.clone(), counts.iter().map(|&c| c as f64).chain([0.0]).collect())
        }
    };
    if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
        return Err(Error::Config("non-finite plot coordinate".into()));
    }
    let ax = Axis::fit(xs.iter().cloned());
    let ay = Axis::fit(ys.iter().cloned());
    let px = |v: f64| ax.map(v, MARGIN, WIDTH - MARGIN / 2.0);
    let py = |v: f64| ay.map(v, HEIGHT - MARGIN, MARGIN / 2.0);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(&style.title));
    let (x0, x1, y0, y1) = (MARGIN, WIDTH - MARGIN / 2.0, HEIGHT - MARGIN, MARGIN / 2.0);
    let _ = writeln!(s, r#"<g class="axes" stroke="black" stroke-width="1">"#);
    let _ = writeln!(s, r#"<line x1="{x0:.3}" y1="{y0:.3}" x2="{x1:.3}" y2="{y0:.3}"/>"#);
    let _ = writeln!(s, r#"<line x1="{x0:.3}" y1="{y0:.3}" x2="{x0:.3}" y2="{y1:.3}"/>"#);
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g class="ticks" font-size="10">"#);
    for k in 0..=4 {
        let vx = ax.lo + (ax.hi - ax.lo) * k as f64 / 4.0;
        let vy = ay.lo + (ay.hi - ay.lo) * k as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">{}</text>"#, px(vx), y0 + 16.0, tick(vx));
        let _ = writeln!(s, r#"<text x="{:.3}" y="{:.3}" text-anchor="end">{}</text>"#, x0 - 6.0, py(vy) + 3.0, tick(vy));
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<text class="xlabel" x="{:.3}" y="{:.3}" text-anchor="middle" font-size="12">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 20.0,
        escape(&style.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text class="ylabel" x="16" y="{:.3}" text-anchor="middle" font-size="12" transform="rotate(-90 16 {:.3})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(&style.y_label)
    );
    match data {
        PlotData::Scatter { points, lattice } => {
            if !lattice.is_empty() {
                let mut d = String::new();
                for &(x, y) in lattice {
                    let (cx, cy) = (px(x), py(y));
                    let _ = write!(d, "M{:.3} {:.3}L{:.3} {:.3}M{:.3} {:.3}L{:.3} {:.3}", cx - 4.0, cy - 4.0, cx + 4.0, cy + 4.0, cx - 4.0, cy + 4.0, cx + 4.0, cy - 4.0);
                }
                let _ = writeln!(s, r#"<path class="lattice" d="{d}" stroke="gray" stroke-width="1" fill="none"/>"#);
            }
            for &(x, y) in points {
                let _ = writeln!(s, r#"<circle class="marker" cx="{:.3}" cy="{:.3}" r="3" fill="black"/>"#, px(x), py(y));
            }
        }
        PlotData::Curve { radii, counts } => {
            let mut pts = format!("{:.3},{:.3}", px(radii[0]), py(0.0));
            let mut prev = 0u64;
            for (&r, &c) in radii.iter().zip(counts) {
                let _ = write!(pts, " {:.3},{:.3} {:.3},{:.3}", px(r), py(prev as f64), px(r), py(c as f64));
                prev = c;
            }
            let _ = writeln!(s, r#"<polyline class="curve" points="{pts}" stroke="black" fill="none"/>"#);
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}
