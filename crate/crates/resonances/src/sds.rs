//! Radial Schwarzschild–de Sitter pencils per angular momentum and their
//! filtered quasinormal spectra.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::background::{
    conjugation_profile, horizon_roots, metric_derivative, metric_factored, photon_sphere_estimate, Horizons,
    RhoProfile, SdSParams,
};
use crate::exec::Exec;
use crate::spectral::{
    build_grid, filter_spectrum, solve_pencil, CollocationGrid, FilterOptions, ModelTag, PencilMatrices, Spectrum,
    Window,
};
use crate::{Error, Result};

/// Overtone depth covered by the default trust window.
pub const DEFAULT_K_MAX: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QnmRequest {
    pub params: SdSParams,
    pub ell_min: u32,
    pub ell_max: u32,
    pub n_low: usize,
    pub n_high: usize,
    pub window: Window,
    pub rho: RhoProfile,
    pub filter: FilterOptions,
}

/// Strip Im λ ≥ −1.5·c·(k_max + ½), c the photon-sphere spacing.
pub fn default_window(p: &SdSParams, k_max: u32) -> Window {
    Window::strip(1.5 * photon_sphere_estimate(p) * (k_max as f64 + 0.5))
}

impl QnmRequest {
    pub fn new(params: SdSParams, ell_min: u32, ell_max: u32) -> Self {
        let window = default_window(&params, DEFAULT_K_MAX);
        Self {
            params,
            ell_min,
            ell_max,
            n_low: 64,
            n_high: 96,
            window,
            rho: RhoProfile::default(),
            filter: FilterOptions { window, ..FilterOptions::default() },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ell_min > self.ell_max {
            return Err(Error::Config(format!("empty ell range {}..={}", self.ell_min, self.ell_max)));
        }
        if 2 * self.n_high < 3 * self.n_low {
            return Err(Error::Config(format!(
                "n_high={} must be at least 3/2 of n_low={}",
                self.n_high, self.n_low
            )));
        }
        for (name, v) in [
            ("drift_tol", self.filter.drift_tol),
            ("residual_tol", self.filter.residual_tol),
            ("split_tol", self.filter.split_tol),
        ] {
            if !(v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        self.rho.validate()
    }
}

/// Collocated radial pencil for angular momentum `ell` on a grid spanning
/// exactly [r₋, r₊].
pub fn build_radial_pencil(
    ell: u32,
    params: &SdSParams,
    horizons: &Horizons,
    grid: &CollocationGrid,
    rho: &RhoProfile,
) -> Result<PencilMatrices> {
    let tol = 1e-10 * horizons.r_plus.max(1.0);
    if (grid.a - horizons.r_minus).abs() > tol || (grid.b - horizons.r_plus).abs() > tol {
        return Err(Error::Geometry(format!(
            "grid [{}, {}] does not span the horizons [{}, {}]",
            grid.a, grid.b, horizons.r_minus, horizons.r_plus
        )));
    }
    let n = grid.n;
    let i = Complex64::new(0.0, 1.0);
    let angular = (ell as f64) * (ell as f64 + 1.0);
    let mut a2 = DMatrix::<Complex64>::zeros(n, n);
    let mut a1 = DMatrix::<Complex64>::zeros(n, n);
    let mut a0 = DMatrix::<Complex64>::zeros(n, n);
    for row in 0..n {
        let r = grid.nodes[row];
        let g = metric_factored(r, params, horizons);
        let gp = metric_derivative(r, params)?;
        let conj = conjugation_profile(r, params, horizons, rho)?;
        let first = -(2.0 * g / r + gp);
        for col in 0..n {
            a2[(row, col)] = Complex64::new(-g * grid.d2[(row, col)] + first * grid.d1[(row, col)], 0.0);
            a1[(row, col)] = -2.0 * i * conj.gfprime * grid.d1[(row, col)];
        }
        a2[(row, row)] += angular / (r * r);
        a1[(row, row)] -= i * (conj.gfprime_deriv + 2.0 * conj.gfprime / r);
        a0[(row, row)] = Complex64::new(-conj.lambda2_coeff, 0.0);
    }
    PencilMatrices::new(a2, a1, a0, ModelTag::Sds { mass: params.mass, lambda: params.lambda, ell })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QnmResult {
    pub spectrum: Spectrum,
    pub warnings: Vec<String>,
}

fn solve_one(ell: u32, n: usize, params: &SdSParams, horizons: &Horizons, rho: &RhoProfile) -> Result<Spectrum> {
    let grid = build_grid(n, horizons.r_minus, horizons.r_plus)?;
    solve_pencil(&build_radial_pencil(ell, params, horizons, &grid, rho)?)
}

/// Filtered spectra for every ℓ in the request, merged and sorted by ℓ
/// then real part. The ℓ = 0 constant mode is flagged as a zero mode.
pub fn compute_qnm(req: &QnmRequest, exec: Exec) -> Result<QnmResult> {
    req.validate()?;
    let horizons = horizon_roots(&req.params)?;
    let tasks: Vec<(u32, usize)> = (req.ell_min..=req.ell_max)
        .flat_map(|ell| [(ell, req.n_low), (ell, req.n_high)])
        .collect();
    let solved = exec.map(tasks, |(ell, n)| solve_one(ell, n, &req.params, &horizons, &req.rho));
    let opts = FilterOptions { window: req.window, ..req.filter };
    let mut out = QnmResult::default();
    let mut it = solved.into_iter();
    for ell in req.ell_min..=req.ell_max {
        let low = it.next().expect("low-resolution task")?;
        let high = it.next().expect("high-resolution task")?;
        let filtered = filter_spectrum(&low, &high, &opts)?;
        if filtered.accepted().next().is_none() {
            out.warnings.push(format!("ell={ell}: no eigenvalue accepted"));
        }
        out.spectrum.entries.extend(filtered.entries);
    }
    out.spectrum.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (SdSParams, Horizons) {
        let p = SdSParams::new(1.0, 0.04).unwrap();
        let h = horizon_roots(&p).unwrap();
        (p, h)
    }

    #[test]
    fn endpoint_values() {
        let (p, h) = setup();
        let grid = build_grid(24, h.r_minus, h.r_plus).unwrap();
        let pen = build_radial_pencil(2, &p, &h, &grid, &RhoProfile::default()).unwrap();
        let expected = -1.0 / (1.0 - p.mu());
        for j in [0, grid.n - 1] {
            assert!((pen.a0[(j, j)].re - expected).abs() < 1e-10);
        }
        // coefficient of D_r in a1 equals 2GF′ = ±2
        let d = grid.d1[(0, 1)];
        assert!((pen.a1[(0, 1)] / Complex64::new(0.0, -d) - 2.0).norm() < 1e-10);
        let last = grid.n - 1;
        let d = grid.d1[(last, 0)];
        assert!((pen.a1[(last, 0)] / Complex64::new(0.0, -d) + 2.0).norm() < 1e-10);
    }

    #[test]
    fn angular_term_isolated() {
        let (p, h) = setup();
        let grid = build_grid(16, h.r_minus, h.r_plus).unwrap();
        let rho = RhoProfile::default();
        let p0 = build_radial_pencil(0, &p, &h, &grid, &rho).unwrap();
        let p5 = build_radial_pencil(5, &p, &h, &grid, &rho).unwrap();
        let diff = &p5.a2 - &p0.a2;
        for i in 0..grid.n {
            for j in 0..grid.n {
                let expected = if i == j { 30.0 / (grid.nodes[i] * grid.nodes[i]) } else { 0.0 };
                assert!((diff[(i, j)].re - expected).abs() < 1e-12 && diff[(i, j)].im == 0.0);
            }
        }
        assert_eq!(p0.a1, p5.a1);
        assert_eq!(p0.a0, p5.a0);
    }

    #[test]
    fn wrong_grid_is_rejected() {
        let (p, h) = setup();
        let grid = build_grid(16, h.r_minus + 1e-3, h.r_plus).unwrap();
        assert!(matches!(
            build_radial_pencil(1, &p, &h, &grid, &RhoProfile::default()),
            Err(Error::Geometry(_))
        ));
    }

    #[test]
    fn request_validation() {
        let (p, _) = setup();
        let mut req = QnmRequest::new(p, 0, 2);
        req.n_high = 80;
        assert!(matches!(req.validate(), Err(Error::Config(_))));
        req.n_high = 96;
        req.ell_min = 3;
        assert!(matches!(req.validate(), Err(Error::Config(_))));
    }
}
