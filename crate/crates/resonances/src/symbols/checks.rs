use serde::{Deserialize, Serialize};

use super::{Chart, MinTracker, ModelSymbols, SymbolGrid, SymbolReport};
use crate::{Error, Result};

/// Tolerance on w(0) and on p₂ against its decomposition.
const STRUCTURE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssumptionSuite {
    pub model: String,
    pub reports: Vec<SymbolReport>,
    /// Largest relative defect of p₂(sξ) = s²p₂(ξ), p₁(sξ) = s p₁(ξ).
    pub homogeneity_error: f64,
}

impl AssumptionSuite {
    pub fn pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass) && self.homogeneity_error <= STRUCTURE_TOL
    }
}

/// H_{G₁}p₂ with G₁ = log(2 + |ξ|²).
pub fn escape_bracket(chart: &Chart, x1: f64, xi1: f64, xi_p: &[f64]) -> f64 {
    let n2 = xi1 * xi1 + Chart::norm2(xi_p);
    2.0 * xi1 * (chart.dw(x1) * xi1 * xi1 + chart.dq1(x1, xi_p)) / (2.0 + n2)
}

fn scaled(dir: &(f64, Vec<f64>), s: f64) -> (f64, Vec<f64>) {
    (dir.0 * s, dir.1.iter().map(|v| v * s).collect())
}

fn phase_points(grid: &SymbolGrid, dim: usize) -> Vec<(f64, Vec<f64>)> {
    let dirs = grid.unit_directions(dim);
    let mut out = Vec::with_capacity(dirs.len() * grid.radii.len());
    for &s in &grid.radii {
        for d in &dirs {
            out.push(scaled(d, s));
        }
    }
    out
}

/// Open interior grid (0, extent) of the chart.
fn interior_x(grid: &SymbolGrid, chart: &Chart) -> Vec<f64> {
    let ext = chart.interior_extent();
    let h = ext / (2.0 * grid.x_points.max(2) as f64);
    grid.x_values(h, ext - h)
}

fn assumption_structure(model: &ModelSymbols, grid: &SymbolGrid) -> SymbolReport {
    let mut m = MinTracker::new();
    let mut decomp: f64 = 0.0;
    let mut w0: f64 = 0.0;
    for chart in &model.charts {
        w0 = w0.max(chart.w(0.0).abs());
        m.push(chart.dw(0.0), chart, 0.0, 0.0, &[]);
        for x1 in grid.x_values(-model.eps, model.eps) {
            if x1 != 0.0 {
                m.push(chart.w(x1) / x1, chart, x1, 0.0, &[]);
            }
            for (xi1, xi_p) in phase_points(grid, chart.boundary_dim()) {
                let n2 = xi1 * xi1 + Chart::norm2(&xi_p);
                let d = (chart.p2_native(x1, xi1, &xi_p) - chart.p2(x1, xi1, &xi_p)).abs() / (1.0 + n2);
                decomp = decomp.max(d);
            }
        }
    }
    let mut margin = m.value;
    if w0 > STRUCTURE_TOL {
        margin = -w0;
    }
    if !(decomp <= STRUCTURE_TOL) {
        margin = -decomp;
    }
    SymbolReport::new("A1-boundary-structure", grid.describe(), margin, m.witness, Some(decomp))
}

fn assumption_tangential(model: &ModelSymbols, grid: &SymbolGrid) -> SymbolReport {
    let mut m = MinTracker::new();
    for chart in &model.charts {
        for x1 in grid.x_values(-model.eps, model.eps) {
            for (xi1, xi_p) in phase_points(grid, chart.boundary_dim()) {
                let n2 = Chart::norm2(&xi_p);
                if n2 > 1e-24 {
                    m.push(chart.q1(x1, &xi_p) / n2, chart, x1, xi1, &xi_p);
                }
            }
        }
    }
    let c = m.value;
    SymbolReport::new("A2-tangential-ellipticity", grid.describe(), c, m.witness, Some(c))
}

fn assumption_damping(model: &ModelSymbols, grid: &SymbolGrid) -> SymbolReport {
    let mut m = MinTracker::new();
    for chart in &model.charts {
        for x1 in grid.x_values(-model.eps, model.eps) {
            m.push(-chart.p1(x1, 1.0), chart, x1, 1.0, &[]);
        }
    }
    let c = m.value;
    SymbolReport::new("A3-first-order-sign", grid.describe(), c, m.witness, Some(c))
}

fn assumption_interior(model: &ModelSymbols, grid: &SymbolGrid) -> SymbolReport {
    let mut m = MinTracker::new();
    for chart in &model.charts {
        for x1 in interior_x(grid, chart) {
            for (xi1, xi_p) in phase_points(grid, chart.boundary_dim()) {
                let n2 = xi1 * xi1 + Chart::norm2(&xi_p);
                m.push(chart.p2_native(x1, xi1, &xi_p) / n2, chart, x1, xi1, &xi_p);
            }
        }
    }
    let c = m.value;
    SymbolReport::new("A4-interior-ellipticity", grid.describe(), c, m.witness, Some(c))
}

fn assumption_mass(model: &ModelSymbols, grid: &SymbolGrid) -> SymbolReport {
    let mut m = MinTracker::new();
    for chart in &model.charts {
        let xs = grid.x_values(-model.eps, 0.0).into_iter().chain(interior_x(grid, chart));
        for x1 in xs {
            m.push(-chart.p0(x1), chart, x1, 0.0, &[]);
        }
    }
    let c = m.value;
    SymbolReport::new("A5-zeroth-order-sign", grid.describe(), c, m.witness, Some(c))
}

fn homogeneity(model: &ModelSymbols, grid: &SymbolGrid) -> f64 {
    let mut worst: f64 = 0.0;
    for chart in &model.charts {
        let dirs = grid.unit_directions(chart.boundary_dim());
        for x1 in grid.x_values(-model.eps, model.eps) {
            for d in &dirs {
                let p2 = chart.p2(x1, d.0, &d.1);
                let p1 = chart.p1(x1, d.0);
                for &s in &grid.radii {
                    let (xi1, xi_p) = scaled(d, s);
                    let e2 = (chart.p2(x1, xi1, &xi_p) - s * s * p2).abs() / (s * s * (1.0 + p2.abs()));
                    let e1 = (chart.p1(x1, xi1) - s * p1).abs() / (s * (1.0 + p1.abs()));
                    worst = worst.max(e2).max(e1);
                }
            }
        }
    }
    worst
}

/// Grid verification of the five structural hypotheses and homogeneity.
pub fn check_assumptions(model: &ModelSymbols, grid: &SymbolGrid) -> Result<AssumptionSuite> {
    if model.charts.is_empty() || !(model.eps > 0.0) {
        return Err(Error::Config("model needs at least one chart and eps > 0".into()));
    }
    if grid.radii.is_empty() || grid.radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::Config("grid radii must be positive".into()));
    }
    Ok(AssumptionSuite {
        model: model.name.clone(),
        reports: vec![
            assumption_structure(model, grid),
            assumption_tangential(model, grid),
            assumption_damping(model, grid),
            assumption_interior(model, grid),
            assumption_mass(model, grid),
        ],
        homogeneity_error: homogeneity(model, grid),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonChoice {
    pub eps: f64,
    /// max |∂ₓw| on the collar.
    pub c0: f64,
    pub eps0: f64,
    /// ε₁⁻¹.
    pub eps1_inv: f64,
    /// min H_{G₁}p₂/ξ₁ on the escape region and the threshold it beat.
    pub escape_constant: f64,
    pub escape_threshold: f64,
    /// Minimal ratios in the two ε₀ conditions and their thresholds.
    pub c1_ratio: f64,
    pub c2_ratio: f64,
    pub c2_threshold: f64,
}

/// Grid points plus the directions rescaled so |ξ₁| sits at `k`·ε₁⁻¹(1+|ξ′|).
fn edge_points(grid: &SymbolGrid, dim: usize, eps1_inv: f64) -> Vec<(f64, Vec<f64>)> {
    let mut pts = phase_points(grid, dim);
    let max_r = grid.radii.iter().cloned().fold(1.0, f64::max) * 10.0;
    for d in grid.unit_directions(dim) {
        let np = Chart::norm2(&d.1).sqrt();
        for k in [1.0, 2.0] {
            let den = d.0.abs() - k * eps1_inv * np;
            if den > 0.0 {
                let s = k * eps1_inv / den;
                if s <= max_r {
                    pts.push(scaled(&d, s));
                }
            }
        }
    }
    pts
}

fn escape_min(model: &ModelSymbols, grid: &SymbolGrid, eps1_inv: f64) -> f64 {
    let mut m = f64::INFINITY;
    for chart in &model.charts {
        let pts = edge_points(grid, chart.boundary_dim(), eps1_inv);
        for x1 in grid.x_values(-model.eps, model.eps) {
            for (xi1, xi_p) in &pts {
                let np = Chart::norm2(xi_p).sqrt();
                if xi1.abs() >= eps1_inv * (1.0 + np) * (1.0 - 1e-12) {
                    m = m.min(escape_bracket(chart, x1, *xi1, xi_p) / xi1);
                }
            }
        }
    }
    m
}

/// (c1, c2, c2 at ε₀ = 0) minimal ratios over band points.
fn band_ratios(model: &ModelSymbols, grid: &SymbolGrid, c0: f64, eps0: f64, eps1_inv: f64) -> (f64, f64, f64) {
    let (mut r1, mut r2, mut r2_0) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    for chart in &model.charts {
        let pts = edge_points(grid, chart.boundary_dim(), eps1_inv);
        for x1 in grid.x_values(-model.eps, model.eps) {
            for (xi1, xi_p) in &pts {
                let np2 = Chart::norm2(xi_p);
                if xi1.abs() > 2.0 * eps1_inv * (1.0 + np2.sqrt()) * (1.0 + 1e-12) {
                    continue;
                }
                let n2 = xi1 * xi1 + np2;
                let q = chart.q1(x1, xi_p);
                let loss = c0 * eps0 * xi1 * xi1;
                r1 = r1.min((1.0 + n2 - loss) / (1.0 + n2));
                r2 = r2.min((1.0 + q - loss) / (1.0 + n2));
                r2_0 = r2_0.min((1.0 + q) / (1.0 + n2));
            }
        }
    }
    (r1, r2, r2_0)
}

/// Dyadic search: the smallest ε₁⁻¹ = 2ᵏ/ε giving the escape inequality,
/// then the largest ε₀ = ε·2⁻ᵏ satisfying both collar conditions with
/// thresholds at half their ε₀ → 0 values.
pub fn find_epsilons(model: &ModelSymbols, grid: &SymbolGrid) -> Result<EpsilonChoice> {
    let eps = model.eps;
    let xs = grid.x_values(-eps, eps);
    let mut c0: f64 = 0.0;
    let mut dw_min = f64::INFINITY;
    for chart in &model.charts {
        for &x in &xs {
            c0 = c0.max(chart.dw(x).abs());
            dw_min = dw_min.min(chart.dw(x));
        }
    }
    if !(dw_min > 0.0) {
        return Err(Error::Model(format!("w' is not positive on the collar (min {dw_min})")));
    }
    let escape_threshold = 0.5 * dw_min;
    let mut found = None;
    for k in 0..30 {
        let eps1_inv = 2f64.powi(k) / eps;
        let e = escape_min(model, grid, eps1_inv);
        if e >= escape_threshold {
            found = Some((eps1_inv, e));
            break;
        }
    }
    let (eps1_inv, escape_constant) =
        found.ok_or_else(|| Error::Model("no eps1 up to 2^29/eps satisfies the escape inequality".into()))?;
    for k in 0..60 {
        let eps0 = eps * 2f64.powi(-k);
        let (r1, r2, r2_0) = band_ratios(model, grid, c0, eps0, eps1_inv);
        if r1 >= 0.5 && r2 >= 0.5 * r2_0 {
            return Ok(EpsilonChoice {
                eps,
                c0,
                eps0,
                eps1_inv,
                escape_constant,
                escape_threshold,
                c1_ratio: r1,
                c2_ratio: r2,
                c2_threshold: 0.5 * r2_0,
            });
        }
    }
    Err(Error::Model("no eps0 down to eps*2^-59 satisfies the collar conditions".into()))
}
