use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::checks::escape_bracket;
use super::{Chart, MinTracker, ModelSymbols, SymbolGrid, SymbolReport};
use crate::background::smoothstep;
use crate::exec::Exec;
use crate::{Error, Result};

/// Collar weight ψ with t ψ′(t) < 0 for t ≠ 0.
#[derive(Clone, Copy, Debug)]
pub enum Psi {
    /// ψ = −t²/2.
    Quadratic,
    /// (ψ, ψ′) supplied by the caller.
    Custom(fn(f64) -> (f64, f64)),
}

impl Psi {
    pub fn eval(&self, t: f64) -> (f64, f64) {
        match self {
            Psi::Quadratic => (-0.5 * t * t, -t),
            Psi::Custom(f) => f(t),
        }
    }

    fn validate(&self, eps0: f64) -> Result<()> {
        for k in -64..=64 {
            let t = eps0 * k as f64 / 64.0;
            let (_, d) = self.eval(t);
            if k != 0 && !(t * d < 0.0) {
                return Err(Error::Config(format!("psi violates t psi'(t) < 0 at t={t}")));
            }
        }
        Ok(())
    }
}

/// Transition intervals of the three cutoffs, each a quintic smoothstep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cutoffs {
    /// χ rises 0 → 1 over this interval.
    pub chi: (f64, f64),
    /// χ₁ falls 1 → 0 over this interval.
    pub chi1: (f64, f64),
    /// φ rises over the first interval and falls over the second.
    pub phi_rise: (f64, f64),
    pub phi_fall: (f64, f64),
}

fn ramp(t: f64, (a, b): (f64, f64)) -> (f64, f64) {
    let (v, d) = smoothstep((t - a) / (b - a), 2);
    (v, d / (b - a))
}

impl Cutoffs {
    pub fn standard(eps0: f64) -> Self {
        Self {
            chi: (-eps0, -5.0 * eps0 / 6.0),
            chi1: (-2.0 * eps0 / 3.0, -eps0 / 2.0),
            phi_rise: (-eps0 / 3.0, -eps0 / 6.0),
            phi_fall: (2.0 * eps0 / 3.0, eps0),
        }
    }

    pub fn chi(&self, t: f64) -> f64 {
        ramp(t, self.chi).0
    }

    pub fn chi1(&self, t: f64) -> f64 {
        1.0 - ramp(t, self.chi1).0
    }

    /// (φ, φ′).
    pub fn phi(&self, t: f64) -> (f64, f64) {
        let (u, du) = ramp(t, self.phi_rise);
        let (v, dv) = ramp(t, self.phi_fall);
        (u * (1.0 - v), du * (1.0 - v) - u * dv)
    }

    pub fn validate(&self, eps0: f64) -> Result<()> {
        let tol = 1e-12 * eps0;
        let inside = |name: &str, (a, b): (f64, f64), lo: f64, hi: f64| -> Result<()> {
            if !(a < b && a >= lo - tol && b <= hi + tol) {
                return Err(Error::Config(format!(
                    "{name} transition [{a}, {b}] must lie in [{lo}, {hi}]"
                )));
            }
            Ok(())
        };
        inside("chi", self.chi, -eps0, -5.0 * eps0 / 6.0)?;
        inside("chi1", self.chi1, -2.0 * eps0 / 3.0, -eps0 / 2.0)?;
        inside("phi rise", self.phi_rise, -eps0 / 3.0, -eps0 / 6.0)?;
        inside("phi fall", self.phi_fall, 2.0 * eps0 / 3.0, eps0)?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EscapeConfig {
    pub eps0: f64,
    /// ε₁⁻¹.
    pub eps1_inv: f64,
    pub tau: f64,
    pub psi: Psi,
    pub cutoffs: Cutoffs,
}

impl EscapeConfig {
    pub fn new(eps0: f64, eps1_inv: f64, tau: f64) -> Self {
        Self { eps0, eps1_inv, tau, psi: Psi::Quadratic, cutoffs: Cutoffs::standard(eps0) }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps0 > 0.0 && self.eps1_inv > 0.0 && self.tau >= 0.0) {
            return Err(Error::Config(format!(
                "need eps0 > 0, eps1 > 0, tau >= 0; got {}, {}, {}",
                self.eps0,
                1.0 / self.eps1_inv,
                self.tau
            )));
        }
        self.cutoffs.validate(self.eps0)?;
        self.psi.validate(self.eps0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    Real,
    Plus,
    Minus,
}

impl Region {
    pub fn id(self) -> &'static str {
        match self {
            Region::Real => "V_R",
            Region::Plus => "V_+",
            Region::Minus => "V_-",
        }
    }

    /// Membership of (x₁, ξ₁, |ξ′|).
    pub fn contains(self, cfg: &EscapeConfig, x1: f64, xi1: f64, xi_p_norm: f64) -> bool {
        let e = cfg.eps0;
        let collar = x1 >= -5.0 * e / 6.0 && x1 <= 2.0 * e / 3.0;
        let edge = cfg.eps1_inv * (1.0 + xi_p_norm);
        match self {
            Region::Real => {
                x1 <= -2.0 * e / 3.0 || x1 >= e / 3.0 || (collar && xi1.abs() <= 2.0 * edge)
            }
            Region::Plus => collar && xi1 >= edge,
            Region::Minus => collar && -xi1 >= edge,
        }
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Coefficients (A, B, C) with p̃ = A + ωB + ω²C.
fn ptilde_parts(chart: &Chart, cfg: &EscapeConfig, x1: f64, xi1: f64, xi_p: &[f64]) -> [Complex64; 3] {
    let i = Complex64::new(0.0, 1.0);
    let n2 = xi1 * xi1 + norm2(xi_p);
    let chi = cfg.cutoffs.chi(x1);
    let outer = Complex64::new(cfg.cutoffs.chi1(x1) * (1.0 + n2), 0.0);
    if chi == 0.0 {
        return [outer, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
    }
    let w = chart.w(x1);
    let (_, dpsi) = cfg.psi.eval(x1);
    let a = Complex64::new(w * xi1 * xi1 + chart.q1(x1, xi_p) - dpsi * dpsi * w, 2.0 * w * dpsi * xi1);
    let b = Complex64::new(chart.p1(x1, xi1), 0.0) + i * chart.p1(x1, dpsi);
    let c = Complex64::new(chart.p0(x1), 0.0);
    [chi * a + outer, chi * b, chi * c]
}

/// The conjugated, cut-off symbol p̃(x, ξ; ω) on the collar.
pub fn ptilde(chart: &Chart, cfg: &EscapeConfig, x1: f64, xi1: f64, xi_p: &[f64], omega: Complex64) -> Complex64 {
    let [a, b, c] = ptilde_parts(chart, cfg, x1, xi1, xi_p);
    a + omega * b + omega * omega * c
}

/// τ H_{G₀}p₂ with G₀ = −φ G₁: first-order change of p̃ under the
/// Lagrangian deformation.
fn deformation(chart: &Chart, cfg: &EscapeConfig, x1: f64, xi1: f64, xi_p: &[f64]) -> f64 {
    let (phi, dphi) = cfg.cutoffs.phi(x1);
    if phi == 0.0 && dphi == 0.0 {
        return 0.0;
    }
    let g1 = (2.0 + xi1 * xi1 + norm2(xi_p)).ln();
    let w = chart.w(x1);
    cfg.tau * (-phi * escape_bracket(chart, x1, xi1, xi_p) + 2.0 * w * dphi * g1 * xi1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PtildeReport {
    pub omega_re: f64,
    pub omega_im: f64,
    /// V_R, V₊, V₋ margins above the floor, normalized by ⟨ξ⟩.
    pub regions: Vec<SymbolReport>,
    /// Smallest ⟨ξ⟩ floor (50·2ᵏ) above which all three signs hold.
    pub floor: Option<f64>,
    /// Largest κ with the signs intact at ω = −iκ.
    pub kappa: f64,
    /// Smallest ν with the signs holding everywhere at ω = iν.
    pub nu: Option<f64>,
    /// max τ²(log⟨ξ⟩)²/⟨ξ⟩ over V± above the floor.
    pub slack: f64,
    pub points: usize,
}

struct Point {
    chart: usize,
    x1: f64,
    xi1: f64,
    xi_p: Vec<f64>,
    bracket: f64,
    regions: [bool; 3],
    parts: [Complex64; 3],
    deform: f64,
}

const REGIONS: [Region; 3] = [Region::Real, Region::Plus, Region::Minus];

fn build_points(model: &ModelSymbols, cfg: &EscapeConfig, grid: &SymbolGrid, exec: Exec) -> Vec<Point> {
    let eps = model.eps;
    let mut xs = grid.x_values(-eps, eps);
    let band = (1.1 * cfg.eps0).min(eps);
    xs.extend(grid.x_values(-band, band));
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let max_r = grid.radii.iter().cloned().fold(1.0, f64::max) * 10.0;
    let mut tasks = Vec::new();
    for (ci, chart) in model.charts.iter().enumerate() {
        let dirs = grid.unit_directions(chart.boundary_dim());
        let mut xi = Vec::new();
        for d in &dirs {
            for &s in &grid.radii {
                xi.push((d.0 * s, d.1.iter().map(|v| v * s).collect::<Vec<_>>()));
            }
            let np = norm2(&d.1).sqrt();
            for k in [1.0, 2.0] {
                let den = d.0.abs() - k * cfg.eps1_inv * np;
                if den > 0.0 {
                    let s = k * cfg.eps1_inv / den * (1.0 + 1e-9);
                    if s <= max_r {
                        xi.push((d.0 * s, d.1.iter().map(|v| v * s).collect()));
                    }
                }
            }
        }
        for &x in &xs {
            tasks.push((ci, x, xi.clone()));
        }
    }
    let chunks = exec.map(tasks, |(ci, x1, xis)| {
        let chart = &model.charts[ci];
        xis.into_iter()
            .map(|(xi1, xi_p)| {
                let np = norm2(&xi_p).sqrt();
                Point {
                    chart: ci,
                    x1,
                    xi1,
                    bracket: (1.0 + xi1 * xi1 + np * np).sqrt(),
                    regions: REGIONS.map(|r| r.contains(cfg, x1, xi1, np)),
                    parts: ptilde_parts(chart, cfg, x1, xi1, &xi_p),
                    deform: deformation(chart, cfg, x1, xi1, &xi_p),
                    xi_p,
                }
            })
            .collect::<Vec<_>>()
    });
    chunks.into_iter().flatten().collect()
}

fn margins(model: &ModelSymbols, pts: &[Point], omega: Complex64, floor: f64) -> [MinTracker; 3] {
    let mut out = [MinTracker::new(), MinTracker::new(), MinTracker::new()];
    for p in pts.iter().filter(|p| p.bracket >= floor) {
        let [a, b, c] = p.parts;
        let v = a + omega * b + omega * omega * c;
        let vals = [v.re / p.bracket, -(v.im + p.deform) / p.bracket, (v.im + p.deform) / p.bracket];
        for k in 0..3 {
            if p.regions[k] {
                out[k].push(vals[k], &model.charts[p.chart], p.x1, p.xi1, &p.xi_p);
            }
        }
    }
    out
}

fn all_positive(m: &[MinTracker; 3]) -> bool {
    m.iter().all(|t| t.value > 0.0)
}

/// Margins of p̃ on V_R, V₊, V₋ at `omega` above the frequency floor, the
/// largest admissible κ, the ν sweep and the second-order slack.
pub fn ptilde_margins(
    model: &ModelSymbols,
    cfg: &EscapeConfig,
    omega: Complex64,
    grid: &SymbolGrid,
    exec: Exec,
) -> Result<PtildeReport> {
    cfg.validate()?;
    if cfg.eps0 > model.eps {
        return Err(Error::Config(format!("eps0={} exceeds the collar width {}", cfg.eps0, model.eps)));
    }
    let pts = build_points(model, cfg, grid, exec);
    let mut floor = None;
    let mut f = 50.0;
    for _ in 0..12 {
        if !pts.iter().any(|p| p.bracket >= f) {
            break;
        }
        if all_positive(&margins(model, &pts, omega, f)) {
            floor = Some(f);
            break;
        }
        f *= 2.0;
    }
    let used = floor.unwrap_or(50.0);
    let at = margins(model, &pts, omega, used);
    let regions = REGIONS
        .iter()
        .zip(at)
        .map(|(r, t)| SymbolReport::new(r.id(), grid.describe(), t.value, t.witness, None))
        .collect();

    let ok_kappa = |k: f64| all_positive(&margins(model, &pts, Complex64::new(0.0, -k), used));
    let mut kappa = 0.0;
    if floor.is_some() && ok_kappa(0.0) {
        let mut hi = 1.0;
        while ok_kappa(hi) && hi < 1e3 {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..50 {
            let mid = 0.5 * (lo + hi);
            if ok_kappa(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        kappa = lo;
    }

    let ok_nu = |v: f64| all_positive(&margins(model, &pts, Complex64::new(0.0, v), 0.0));
    let mut nu = None;
    if ok_nu(0.0) {
        nu = Some(0.0);
    } else {
        let mut lo = 0.0;
        let mut hi = 0.0625;
        while hi <= 4096.0 && !ok_nu(hi) {
            lo = hi;
            hi *= 2.0;
        }
        if hi <= 4096.0 {
            for _ in 0..40 {
                let mid = 0.5 * (lo + hi);
                if ok_nu(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            nu = Some(hi);
        }
    }

    let slack = pts
        .iter()
        .filter(|p| p.bracket >= used && (p.regions[1] || p.regions[2]))
        .map(|p| cfg.tau * cfg.tau * p.bracket.ln().powi(2) / p.bracket)
        .fold(0.0, f64::max);
    Ok(PtildeReport {
        omega_re: omega.re,
        omega_im: omega.im,
        regions,
        floor,
        kappa,
        nu,
        slack,
        points: pts.len(),
    })
}
