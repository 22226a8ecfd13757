//! Hyperbolic funnel model: per-Fourier-mode modified Laplacian pencils on
//! x ∈ [0, 1] (conformal boundary at x = 0, neck at x = 1) and their
//! scattering resonances.

mod oracle;
mod route;

pub use oracle::{wronskian_oracle, Cell, OracleOptions, OracleRoot};
pub use route::{
    angular_constant, coefficients, compare_routes, AHPencilCoefficients, Poly, Rational, Route, Weight,
};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::exec::Exec;
use crate::spectral::{
    build_grid, filter_spectrum, solve_pencil, Bc, CollocationGrid, FilterOptions, ModelTag, PencilMatrices,
    Spectrum, Window,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeckBc {
    Dirichlet,
    Neumann,
    Both,
}

impl NeckBc {
    pub fn conditions(self) -> Vec<Bc> {
        match self {
            NeckBc::Dirichlet => vec![Bc::Dirichlet],
            NeckBc::Neumann => vec![Bc::Neumann],
            NeckBc::Both => vec![Bc::Dirichlet, Bc::Neumann],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunnelParams {
    /// Neck parameter ℓ̃; the closed geodesic has length 2πℓ̃.
    pub circumference: f64,
    pub m_min: i64,
    pub m_max: i64,
    pub neck_bc: NeckBc,
}

impl FunnelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.circumference > 0.0 && self.circumference.is_finite()) {
            return Err(Error::Config(format!("circumference must be positive, got {}", self.circumference)));
        }
        if self.m_min > self.m_max {
            return Err(Error::Config(format!("empty mode range {}..={}", self.m_min, self.m_max)));
        }
        if self.m_min < 0 && self.m_min != -self.m_max {
            return Err(Error::Config("mode range must be nonnegative or symmetric about 0".into()));
        }
        Ok(())
    }

    /// True when only m ≥ 0 is computed and ±m must be folded in counting.
    pub fn folded(&self) -> bool {
        self.m_min >= 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunnelRequest {
    pub params: FunnelParams,
    pub n_low: usize,
    pub n_high: usize,
    pub window: Window,
    pub filter: FilterOptions,
}

pub const DEFAULT_GAMMA: f64 = 4.0;

impl FunnelRequest {
    pub fn new(params: FunnelParams) -> Self {
        let window = Window::strip(DEFAULT_GAMMA);
        Self { params, n_low: 20, n_high: 30, window, filter: FilterOptions { window, ..FilterOptions::default() } }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if 2 * self.n_high < 3 * self.n_low {
            return Err(Error::Config(format!(
                "n_high={} must be at least 3/2 of n_low={}",
                self.n_high, self.n_low
            )));
        }
        Ok(())
    }
}

/// Pencil for mode m from the compactified conjugation, with the neck
/// condition eliminated from node 0 (x = 1).
pub fn build_funnel_pencil(m: i64, circumference: f64, grid: &CollocationGrid, bc: Bc) -> Result<PencilMatrices> {
    build_funnel_pencil_with(Route::Conjugated(Weight::Compactified), m, circumference, grid, bc)
}

pub fn build_funnel_pencil_with(
    route: Route,
    m: i64,
    circumference: f64,
    grid: &CollocationGrid,
    bc: Bc,
) -> Result<PencilMatrices> {
    if grid.a != 0.0 || grid.b != 1.0 {
        return Err(Error::Unsupported(format!(
            "funnel pencils live on [0, 1], got [{}, {}]",
            grid.a, grid.b
        )));
    }
    let co = coefficients(route, m, circumference);
    let n = grid.n;
    let mut mats: Vec<DMatrix<Complex64>> = Vec::with_capacity(3);
    for power in 0..3 {
        let mut a = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            let x = grid.nodes[i];
            let (c2, c1, c0) = (co.eval(2, power, x), co.eval(1, power, x), co.eval(0, power, x));
            for j in 0..n {
                a[(i, j)] = c2 * grid.d2[(i, j)] + c1 * grid.d1[(i, j)];
            }
            a[(i, i)] += c0;
        }
        mats.push(a);
    }
    let reduced: Vec<DMatrix<Complex64>> = match bc {
        Bc::Dirichlet => mats.iter().map(|a| a.view((1, 1), (n - 1, n - 1)).into_owned()).collect(),
        Bc::Neumann => {
            // v₀ = Σ_j w_j v_j from the derivative row at the neck
            let d00 = grid.d1[(0, 0)];
            let w: Vec<f64> = (1..n).map(|j| -grid.d1[(0, j)] / d00).collect();
            mats.iter()
                .map(|a| {
                    let mut b = a.view((1, 1), (n - 1, n - 1)).into_owned();
                    for i in 0..n - 1 {
                        for j in 0..n - 1 {
                            b[(i, j)] += a[(i + 1, 0)] * w[j];
                        }
                    }
                    b
                })
                .collect()
        }
    };
    let mut it = reduced.into_iter();
    let (a2, a1, a0) = (it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
    PencilMatrices::new(a2, a1, a0, ModelTag::Funnel { circumference, m, bc })
}

fn solve_one(m: i64, bc: Bc, n: usize, circumference: f64) -> Result<Spectrum> {
    let grid = build_grid(n, 0.0, 1.0)?;
    let mut spec = solve_pencil(&build_funnel_pencil(m, circumference, &grid, bc)?)?;
    for e in &mut spec.entries {
        e.resolution = n;
    }
    Ok(spec)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FunnelResult {
    pub spectrum: Spectrum,
    pub warnings: Vec<String>,
}

/// Filtered spectra tagged by (m, bc), sorted by m, bc, then real part.
/// Resolutions are node counts on [0, 1] before the neck elimination.
pub fn compute_funnel_resonances(req: &FunnelRequest, exec: Exec) -> Result<FunnelResult> {
    req.validate()?;
    let fp = req.params;
    let mut keys = Vec::new();
    for m in fp.m_min..=fp.m_max {
        for bc in fp.neck_bc.conditions() {
            keys.push((m, bc));
        }
    }
    let tasks: Vec<(i64, Bc, usize)> =
        keys.iter().flat_map(|&(m, bc)| [(m, bc, req.n_low), (m, bc, req.n_high)]).collect();
    let solved = exec.map(tasks, |(m, bc, n)| solve_one(m, bc, n, fp.circumference));
    let opts = FilterOptions { window: req.window, ..req.filter };
    let mut out = FunnelResult::default();
    let mut it = solved.into_iter();
    for (m, bc) in keys {
        let low = it.next().expect("low-resolution task")?;
        let high = it.next().expect("high-resolution task")?;
        let filtered = filter_spectrum(&low, &high, &opts)?;
        if filtered.accepted().next().is_none() {
            out.warnings.push(format!("m={m}, bc={}: no eigenvalue accepted", bc.label()));
        }
        out.spectrum.entries.extend(filtered.entries);
    }
    out.spectrum.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angular_potential_constant() {
        let a = angular_constant(3, 2.0 * std::f64::consts::PI);
        assert!((a - 9.0 / (4.0 * std::f64::consts::PI.powi(2))).abs() < 1e-15);
    }

    #[test]
    fn domain_must_be_unit_interval() {
        let grid = build_grid(12, 0.0, 0.9).unwrap();
        assert!(matches!(build_funnel_pencil(0, 1.0, &grid, Bc::Dirichlet), Err(Error::Unsupported(_))));
    }

    #[test]
    fn lambda_squared_term_is_minus_identity() {
        let grid = build_grid(12, 0.0, 1.0).unwrap();
        for bc in [Bc::Dirichlet, Bc::Neumann] {
            let p = build_funnel_pencil(2, 1.0, &grid, bc).unwrap();
            assert_eq!(p.dim(), 11);
            assert_eq!(p.a0, -DMatrix::<Complex64>::identity(11, 11));
        }
    }

    #[test]
    fn symmetric_mode_range_validation() {
        let fp = FunnelParams { circumference: 1.0, m_min: -2, m_max: 3, neck_bc: NeckBc::Both };
        assert!(fp.validate().is_err());
    }
}
