use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eig::eig_dense;
use super::ZERO_MODE_TOL;
use crate::{Error, Result};

/// Boundary condition at the neck of the funnel model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bc {
    Dirichlet,
    Neumann,
}

impl Bc {
    pub fn label(self) -> &'static str {
        match self {
            Bc::Dirichlet => "dirichlet",
            Bc::Neumann => "neumann",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelTag {
    Sds { mass: f64, lambda: f64, ell: u32 },
    Funnel { circumference: f64, m: i64, bc: Bc },
    Synthetic,
}

impl ModelTag {
    pub fn mode_index(&self) -> i64 {
        match self {
            ModelTag::Sds { ell, .. } => *ell as i64,
            ModelTag::Funnel { m, .. } => *m,
            ModelTag::Synthetic => 0,
        }
    }

    pub fn bc(&self) -> Option<Bc> {
        match self {
            ModelTag::Funnel { bc, .. } => Some(*bc),
            _ => None,
        }
    }
}

/// Discretized pencil; eigenproblem (a2 + λ·a1 + λ²·a0)v = 0.
#[derive(Clone, Debug)]
pub struct PencilMatrices {
    pub a2: DMatrix<Complex64>,
    pub a1: DMatrix<Complex64>,
    pub a0: DMatrix<Complex64>,
    pub meta: ModelTag,
}

impl PencilMatrices {
    pub fn new(
        a2: DMatrix<Complex64>,
        a1: DMatrix<Complex64>,
        a0: DMatrix<Complex64>,
        meta: ModelTag,
    ) -> Result<Self> {
        let n = a2.nrows();
        for m in [&a2, &a1, &a0] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::Config("pencil matrices must be square and of equal size".into()));
            }
        }
        Ok(Self { a2, a1, a0, meta })
    }

    pub fn dim(&self) -> usize {
        self.a2.nrows()
    }

    pub fn eval(&self, lambda: Complex64) -> DMatrix<Complex64> {
        &self.a2 + &self.a1 * lambda + &self.a0 * (lambda * lambda)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub lambda: Complex64,
    pub residual: f64,
    pub accepted: bool,
    pub mode_index: i64,
    pub resolution: usize,
    pub drift: Option<f64>,
    pub bc: Option<Bc>,
    pub zero_mode: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub entries: Vec<SpectrumEntry>,
}

impl Spectrum {
    pub fn accepted(&self) -> impl Iterator<Item = &SpectrumEntry> {
        self.entries.iter().filter(|e| e.accepted)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn resolution(&self) -> usize {
        self.entries.first().map(|e| e.resolution).unwrap_or(0)
    }

    /// Deterministic order: mode index, then boundary condition, then real
    /// part, then imaginary part.
    pub fn sort(&mut self) {
        self.entries.sort_by(|a, b| {
            a.mode_index
                .cmp(&b.mode_index)
                .then(a.bc.cmp(&b.bc))
                .then(a.lambda.re.total_cmp(&b.lambda.re))
                .then(a.lambda.im.total_cmp(&b.lambda.im))
        });
    }
}

fn is_diagonal(m: &DMatrix<Complex64>) -> bool {
    let n = m.nrows();
    (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)] == Complex64::new(0.0, 0.0)))
}

fn a0_inverse(a0: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let n = a0.nrows();
    if is_diagonal(a0) {
        let mags: Vec<f64> = (0..n).map(|i| a0[(i, i)].norm()).collect();
        let max = mags.iter().cloned().fold(0.0, f64::max);
        let min = mags.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(min > 0.0) || max / min > 1e12 {
            return Err(Error::Linearization(format!("a0 is numerically singular (cond {:.3e})", max / min)));
        }
        return Ok(DMatrix::from_diagonal(&DVector::from_iterator(n, (0..n).map(|i| 1.0 / a0[(i, i)]))));
    }
    let inv = a0
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Linearization("a0 is singular".into()))?;
    let norm1 = |m: &DMatrix<Complex64>| {
        (0..m.ncols()).map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
    };
    let cond = norm1(a0) * norm1(&inv);
    if !(cond <= 1e12) {
        return Err(Error::Linearization(format!("a0 is numerically singular (cond {cond:.3e})")));
    }
    Ok(inv)
}

/// First companion form B z = λ C z with z = (v, λv).
pub fn linearize(p: &PencilMatrices) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    a0_inverse(&p.a0)?;
    let n = p.dim();
    let one = Complex64::new(1.0, 0.0);
    let mut b = DMatrix::zeros(2 * n, 2 * n);
    let mut c = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        b[(i, n + i)] = one;
        c[(i, i)] = one;
    }
    b.view_mut((n, 0), (n, n)).copy_from(&(-&p.a2));
    b.view_mut((n, n), (n, n)).copy_from(&(-&p.a1));
    c.view_mut((n, n), (n, n)).copy_from(&p.a0);
    Ok((b, c))
}

/// Standard companion matrix C⁻¹B = [[0, I], [−a0⁻¹a2, −a0⁻¹a1]].
pub fn companion(p: &PencilMatrices) -> Result<DMatrix<Complex64>> {
    let inv = a0_inverse(&p.a0)?;
    let n = p.dim();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(i, n + i)] = Complex64::new(1.0, 0.0);
    }
    m.view_mut((n, 0), (n, n)).copy_from(&(-(&inv * &p.a2)));
    m.view_mut((n, n), (n, n)).copy_from(&(-(&inv * &p.a1)));
    Ok(m)
}

fn frob(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// ‖P(λ)v‖ / ((‖a2‖ + |λ|‖a1‖ + |λ|²‖a0‖)‖v‖).
pub fn pencil_residual(p: &PencilMatrices, lambda: Complex64, v: &DVector<Complex64>) -> f64 {
    let l = lambda.norm();
    let scale = frob(&p.a2) + l * frob(&p.a1) + l * l * frob(&p.a0);
    (p.eval(lambda) * v).norm() / (scale * v.norm())
}

fn inverse_iteration(p: &PencilMatrices, lambda: Complex64) -> Option<DVector<Complex64>> {
    let n = p.dim();
    let mut sigma = lambda;
    for attempt in 0..4 {
        let lu = p.eval(sigma).lu();
        let mut v = DVector::from_iterator(
            n,
            (0..n).map(|i| Complex64::new(1.0 + 0.37 * ((i * 7919) % 97) as f64 / 97.0, 0.1 * (i % 5) as f64)),
        );
        let mut ok = true;
        for _ in 0..2 {
            match lu.solve(&v) {
                Some(w) if w.iter().all(|z| z.re.is_finite() && z.im.is_finite()) && w.norm() > 0.0 => {
                    v = &w / Complex64::new(w.norm(), 0.0);
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Some(v);
        }
        sigma = lambda + lambda.norm().max(1.0) * f64::EPSILON * 16.0 * 10f64.powi(attempt);
    }
    None
}

/// All 2n eigenvalues with residuals from inverse-iteration eigenvectors.
pub fn solve_pencil(p: &PencilMatrices) -> Result<Spectrum> {
    let m = companion(p)?;
    let values = eig_dense(&m)?;
    let resolution = p.dim();
    let mode_index = p.meta.mode_index();
    let bc = p.meta.bc();
    let entries = values
        .into_iter()
        .map(|lambda| {
            let residual = inverse_iteration(p, lambda).map(|v| pencil_residual(p, lambda, &v)).unwrap_or(f64::INFINITY);
            SpectrumEntry {
                lambda,
                residual,
                accepted: false,
                mode_index,
                resolution,
                drift: None,
                bc,
                zero_mode: lambda.norm() < ZERO_MODE_TOL,
            }
        })
        .collect();
    Ok(Spectrum { entries })
}
