//! Principal symbols of both models in boundary charts, grid checks of the
//! structural hypotheses, and the escape-function inequalities.

mod checks;
mod escape;

pub use checks::{check_assumptions, escape_bracket, find_epsilons, AssumptionSuite, EpsilonChoice};
pub use escape::{ptilde, ptilde_margins, Cutoffs, EscapeConfig, PtildeReport, Psi, Region};

use serde::{Deserialize, Serialize};

use crate::background::{conjugation_extended, horizon_roots, metric_derivative, metric_factored, Horizons, RhoProfile, SdSParams};
use crate::funnel::{coefficients, Route, Weight};
use crate::Result;

/// One boundary component with its coordinates (x₁, x′, ξ₁, ξ′), x₁ > 0
/// inside the physical region.
#[derive(Clone, Debug, PartialEq)]
pub enum Chart {
    /// x₁ = r − r₋, ξ₁ = ρ.
    SdsInner { params: SdSParams, horizons: Horizons, rho: RhoProfile },
    /// x₁ = r₊ − r, ξ₁ = −ρ.
    SdsOuter { params: SdSParams, horizons: Horizons, rho: RhoProfile },
    /// x₁ = x, ξ′ = Fourier variable θ.
    Funnel { circumference: f64 },
}

impl Chart {
    pub fn label(&self) -> &'static str {
        match self {
            Chart::SdsInner { .. } => "sds-inner",
            Chart::SdsOuter { .. } => "sds-outer",
            Chart::Funnel { .. } => "funnel",
        }
    }

    /// Dimension of ξ′.
    pub fn boundary_dim(&self) -> usize {
        match self {
            Chart::Funnel { .. } => 1,
            _ => 2,
        }
    }

    fn radius(&self, x1: f64) -> f64 {
        match self {
            Chart::SdsInner { horizons, .. } => horizons.r_minus + x1,
            Chart::SdsOuter { horizons, .. } => horizons.r_plus - x1,
            Chart::Funnel { .. } => x1,
        }
    }

    /// Largest x₁ still inside the physical region.
    pub fn interior_extent(&self) -> f64 {
        match self {
            Chart::SdsInner { horizons, .. } | Chart::SdsOuter { horizons, .. } => horizons.width(),
            Chart::Funnel { .. } => 1.0,
        }
    }

    pub fn w(&self, x1: f64) -> f64 {
        match self {
            Chart::SdsInner { params, horizons, .. } | Chart::SdsOuter { params, horizons, .. } => {
                metric_factored(self.radius(x1), params, horizons)
            }
            Chart::Funnel { .. } => x1 * (1.0 + x1) * (1.0 + x1),
        }
    }

    pub fn dw(&self, x1: f64) -> f64 {
        match self {
            Chart::SdsInner { params, .. } => metric_derivative(self.radius(x1), params).unwrap_or(f64::NAN),
            Chart::SdsOuter { params, .. } => -metric_derivative(self.radius(x1), params).unwrap_or(f64::NAN),
            Chart::Funnel { .. } => (1.0 + x1) * (1.0 + 3.0 * x1),
        }
    }

    fn norm2(xi: &[f64]) -> f64 {
        xi.iter().map(|v| v * v).sum()
    }

    pub fn q1(&self, x1: f64, xi_p: &[f64]) -> f64 {
        match self {
            Chart::Funnel { circumference } => Self::norm2(xi_p) / (circumference * circumference),
            _ => {
                let r = self.radius(x1);
                Self::norm2(xi_p) / (r * r)
            }
        }
    }

    pub fn dq1(&self, x1: f64, xi_p: &[f64]) -> f64 {
        match self {
            Chart::Funnel { .. } => 0.0,
            Chart::SdsInner { .. } => -2.0 * Self::norm2(xi_p) / self.radius(x1).powi(3),
            Chart::SdsOuter { .. } => 2.0 * Self::norm2(xi_p) / self.radius(x1).powi(3),
        }
    }

    pub fn p1(&self, x1: f64, xi1: f64) -> f64 {
        match self {
            Chart::SdsInner { params, horizons, rho } => {
                2.0 * conjugation_extended(self.radius(x1), params, horizons, rho).gfprime * xi1
            }
            Chart::SdsOuter { params, horizons, rho } => {
                -2.0 * conjugation_extended(self.radius(x1), params, horizons, rho).gfprime * xi1
            }
            Chart::Funnel { .. } => -(1.0 - x1 * x1) * xi1,
        }
    }

    pub fn p0(&self, x1: f64) -> f64 {
        match self {
            Chart::SdsInner { params, horizons, rho } | Chart::SdsOuter { params, horizons, rho } => {
                -conjugation_extended(self.radius(x1), params, horizons, rho).lambda2_coeff
            }
            Chart::Funnel { .. } => -1.0,
        }
    }

    /// p₂ from the decomposition w ξ₁² + q₁.
    pub fn p2(&self, x1: f64, xi1: f64, xi_p: &[f64]) -> f64 {
        self.w(x1) * xi1 * xi1 + self.q1(x1, xi_p)
    }

    /// p₂ computed from the operator itself: G ρ² + r⁻²|η|² for SdS, the
    /// principal coefficients of the funnel pencil otherwise.
    pub fn p2_native(&self, x1: f64, xi1: f64, xi_p: &[f64]) -> f64 {
        match self {
            Chart::SdsInner { params, .. } | Chart::SdsOuter { params, .. } => {
                let r = self.radius(x1);
                let rho = if matches!(self, Chart::SdsInner { .. }) { xi1 } else { -xi1 };
                let g = 1.0 - params.lambda * r * r / 3.0 - 2.0 * params.mass / r;
                g * rho * rho + Self::norm2(xi_p) / (r * r)
            }
            Chart::Funnel { circumference } => {
                let co = coefficients(Route::Conjugated(Weight::Compactified), 0, *circumference);
                -co.eval(2, 0, x1).re * xi1 * xi1 + Self::norm2(xi_p) / (circumference * circumference)
            }
        }
    }
}

/// Evaluators for one model: one chart per boundary component and the
/// half-width ε of the chart collar.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSymbols {
    pub name: String,
    pub charts: Vec<Chart>,
    pub eps: f64,
}

impl ModelSymbols {
    pub fn sds(params: SdSParams, rho: RhoProfile) -> Result<Self> {
        let horizons = horizon_roots(&params)?;
        Ok(Self {
            name: "sds".into(),
            charts: vec![
                Chart::SdsInner { params, horizons, rho },
                Chart::SdsOuter { params, horizons, rho },
            ],
            eps: 0.25,
        })
    }

    pub fn funnel(circumference: f64) -> Self {
        Self { name: "funnel".into(), charts: vec![Chart::Funnel { circumference }], eps: 0.25 }
    }
}

/// Verification grid: points in x₁, unit directions in (ξ₁, ξ′), radii.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolGrid {
    pub x_points: usize,
    pub directions: usize,
    pub radii: Vec<f64>,
}

impl Default for SymbolGrid {
    fn default() -> Self {
        Self { x_points: 64, directions: 32, radii: vec![1.0, 10.0, 100.0, 1000.0] }
    }
}

impl SymbolGrid {
    pub fn describe(&self) -> String {
        format!("{} x1 points, {} directions, radii {:?}", self.x_points, self.directions, self.radii)
    }

    pub fn x_values(&self, lo: f64, hi: f64) -> Vec<f64> {
        let n = self.x_points.max(2);
        (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
    }

    /// Unit vectors (ξ₁, ξ′) in dimension 1 + `dim`.
    pub fn unit_directions(&self, dim: usize) -> Vec<(f64, Vec<f64>)> {
        let n = self.directions.max(4);
        match dim {
            1 => (0..n)
                .map(|k| {
                    let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                    (t.cos(), vec![t.sin()])
                })
                .collect(),
            _ => {
                // Fibonacci lattice, plus the two poles ξ′ = 0
                let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
                let mut out: Vec<(f64, Vec<f64>)> = (0..n)
                    .map(|k| {
                        let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
                        let s = (1.0 - z * z).sqrt();
                        let t = golden * k as f64;
                        (z, vec![s * t.cos(), s * t.sin()])
                    })
                    .collect();
                out.push((1.0, vec![0.0, 0.0]));
                out.push((-1.0, vec![0.0, 0.0]));
                out
            }
        }
    }
}

/// Phase-space point of a report witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub chart: String,
    pub x1: f64,
    pub xi1: f64,
    pub xi_prime: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolReport {
    pub id: String,
    pub grid: String,
    pub min_margin: f64,
    pub witness: Option<Witness>,
    /// Empirical constant attached to the check (e.g. best C⁻¹).
    pub constant: Option<f64>,
    pub pass: bool,
}

impl SymbolReport {
    pub(crate) fn new(id: &str, grid: String, min_margin: f64, witness: Option<Witness>, constant: Option<f64>) -> Self {
        Self { id: id.into(), grid, pass: min_margin > 0.0, min_margin, witness, constant }
    }
}

/// Running minimum with its argument.
#[derive(Clone, Debug)]
pub(crate) struct MinTracker {
    pub value: f64,
    pub witness: Option<Witness>,
}

impl MinTracker {
    pub fn new() -> Self {
        Self { value: f64::INFINITY, witness: None }
    }

    pub fn push(&mut self, v: f64, chart: &Chart, x1: f64, xi1: f64, xi_p: &[f64]) {
        let v = if v.is_finite() { v } else { f64::NEG_INFINITY };
        if v < self.value || self.witness.is_none() {
            self.value = v;
            self.witness = Some(Witness { chart: chart.label().into(), x1, xi1, xi_prime: xi_p.to_vec() });
        }
    }
}
