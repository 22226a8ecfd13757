//! Independent resonance finder for one Fourier mode: the solution regular
//! at the conformal boundary is continued to the neck by ODE integration,
//! and zeros of its neck value (Dirichlet) or derivative (Neumann) are
//! located with the argument principle.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::route::angular_constant;
use crate::exec::Exec;
use crate::ode::{dopri5, OdeOptions};
use crate::spectral::Bc;
use crate::special::rgamma;
use crate::{Error, Result};

/// Rectangle [re.0, re.1] × [im.0, im.1] in the λ plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl Cell {
    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re.0, self.im.0),
            Complex64::new(self.re.1, self.im.0),
            Complex64::new(self.re.1, self.im.1),
            Complex64::new(self.re.0, self.im.1),
        ]
    }

    fn split(&self, nx: usize, ny: usize) -> Vec<Cell> {
        let dx = (self.re.1 - self.re.0) / nx as f64;
        let dy = (self.im.1 - self.im.0) / ny as f64;
        let mut out = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let re0 = self.re.0 + i as f64 * dx;
                let im0 = self.im.0 + j as f64 * dy;
                let re1 = if i + 1 == nx { self.re.1 } else { re0 + dx };
                let im1 = if j + 1 == ny { self.im.1 } else { im0 + dy };
                out.push(Cell { re: (re0, re1), im: (im0, im1) });
            }
        }
        out
    }

    fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re.0 && z.re <= self.re.1 && z.im >= self.im.0 && z.im <= self.im.1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleOptions {
    pub rtol: f64,
    /// Matching point for the boundary series.
    pub x0: f64,
    pub terms: usize,
    pub cells_re: usize,
    pub cells_im: usize,
    pub quad_nodes: usize,
    pub fd_step: f64,
    pub max_depth: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { rtol: 1e-12, x0: 0.5, terms: 120, cells_re: 1, cells_im: 4, quad_nodes: 48, fd_step: 1e-3, max_depth: 14 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleRoot {
    pub lambda: Complex64,
    pub multiplicity: usize,
}

/// Regular solution at x = 0 and its derivative at `x0`, normalized by
/// 1/Γ(1 − iλ) so that it is entire in λ.
fn boundary_series(lambda: Complex64, a: f64, x0: f64, terms: usize) -> (Complex64, Complex64) {
    let i = Complex64::new(0.0, 1.0);
    let sigma = i * lambda;
    let k0 = 0.25 + a - i * lambda - lambda * lambda;
    let switch = sigma.norm().ceil() as usize + 3;
    let (mut b_prev, mut b) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    let mut coeffs = Vec::with_capacity(terms);
    coeffs.push(rgamma(1.0 - sigma));
    let mut j = 0usize;
    while j + 1 < terms && j + 1 < switch {
        let jf = j as f64;
        let next = ((k0 - 2.0 * jf * jf) * b - (jf - 1.0) * (jf - 1.0 + sigma) * (jf - sigma) * b_prev) / (jf + 1.0);
        b_prev = b;
        b = next;
        j += 1;
        coeffs.push(b * rgamma(jf + 2.0 - sigma));
    }
    while j + 1 < terms {
        let jf = j as f64;
        let aj = coeffs[j];
        let ajm = if j > 0 { coeffs[j - 1] } else { Complex64::new(0.0, 0.0) };
        let next = ((k0 - 2.0 * jf * jf) * aj - (jf - 1.0) * (jf - 1.0 + sigma) * ajm) / ((jf + 1.0) * (jf + 1.0 - sigma));
        coeffs.push(next);
        j += 1;
    }
    let mut v = Complex64::new(0.0, 0.0);
    let mut dv = Complex64::new(0.0, 0.0);
    let mut pw = 1.0;
    for (k, &c) in coeffs.iter().enumerate() {
        if k > 0 {
            dv += c * (k as f64) * pw;
            pw *= x0;
        }
        v += c * pw;
    }
    (v, dv)
}

/// Neck value v(1) (Dirichlet) or v′(1) (Neumann) of the regular solution.
pub fn connection_function(lambda: Complex64, m: i64, circumference: f64, bc: Bc, opts: &OracleOptions) -> Result<Complex64> {
    let a = angular_constant(m, circumference);
    let (v, dv) = boundary_series(lambda, a, opts.x0, opts.terms);
    let i = Complex64::new(0.0, 1.0);
    let k0 = 0.25 + a - i * lambda - lambda * lambda;
    let rhs = |x: f64, y: &[Complex64], dy: &mut [Complex64]| {
        let opx = 1.0 + x;
        let c2 = -x * opx * opx;
        let c1 = -opx * opx + i * lambda * (1.0 - x * x);
        dy[0] = y[1];
        dy[1] = -(c1 * y[1] + k0 * y[0]) / c2;
    };
    let ode = OdeOptions { rtol: opts.rtol, atol: opts.rtol * 1e-6 * (v.norm() + dv.norm()).max(1e-300), ..OdeOptions::default() };
    let y = dopri5(rhs, opts.x0, 1.0, &[v, dv], &ode)?;
    Ok(match bc {
        Bc::Dirichlet => y[0],
        Bc::Neumann => y[1],
    })
}

fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for k in 0..n {
        let mut z = (PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[k] = z;
        w[k] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

struct Finder<'a, F: Fn(Complex64) -> Result<Complex64>> {
    f: &'a F,
    opts: &'a OracleOptions,
}

impl<F: Fn(Complex64) -> Result<Complex64>> Finder<'_, F> {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        let v = (self.f)(z)?;
        if !(v.norm() > 0.0) || !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::Refinement(format!("connection function vanishes or is non-finite at {z}")));
        }
        Ok(v)
    }

    fn derivative(&self, z: Complex64) -> Result<Complex64> {
        let h = self.opts.fd_step * z.norm().max(1.0);
        let f = |s: f64| self.eval(z + s * h);
        Ok((f(-2.0)? - 8.0 * f(-1.0)? + 8.0 * f(1.0)? - f(2.0)?) / (12.0 * h))
    }

    /// Phase increment along a segment, refined until every step turns
    /// by less than π/4.
    fn phase(&self, za: Complex64, fa: Complex64, zb: Complex64, fb: Complex64, depth: usize) -> Result<f64> {
        let d = (fb / fa).arg();
        if d.abs() < PI / 4.0 {
            return Ok(d);
        }
        if depth >= self.opts.max_depth {
            return Err(Error::Refinement(format!("phase sampling did not resolve near {za}..{zb}")));
        }
        let zm = 0.5 * (za + zb);
        let fm = self.eval(zm)?;
        Ok(self.phase(za, fa, zm, fm, depth + 1)? + self.phase(zm, fm, zb, fb, depth + 1)?)
    }

    fn winding(&self, cell: &Cell) -> Result<i64> {
        let c = cell.corners();
        let mut total = 0.0;
        for k in 0..4 {
            let (za, zb) = (c[k], c[(k + 1) % 4]);
            let segs = 16;
            let mut zp = za;
            let mut fp = self.eval(za)?;
            for s in 1..=segs {
                let z = za + (zb - za) * (s as f64 / segs as f64);
                let fz = self.eval(z)?;
                total += self.phase(zp, fp, z, fz, 0)?;
                zp = z;
                fp = fz;
            }
        }
        let w = total / (2.0 * PI);
        let r = w.round();
        if (w - r).abs() > 1e-6 {
            return Err(Error::Refinement(format!("non-integer winding {w} on {cell:?}")));
        }
        Ok(r as i64)
    }

    /// (1/2πi)∮ z^p f′/f dz for p = 1, 2.
    fn moments(&self, cell: &Cell) -> Result<(Complex64, Complex64)> {
        let (xs, ws) = gauss_legendre(self.opts.quad_nodes);
        let c = cell.corners();
        let (mut s1, mut s2) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for k in 0..4 {
            let (za, zb) = (c[k], c[(k + 1) % 4]);
            let half = 0.5 * (zb - za);
            for (&x, &w) in xs.iter().zip(&ws) {
                let z = 0.5 * (za + zb) + half * x;
                let g = self.derivative(z)? / self.eval(z)? * half * w;
                s1 += z * g;
                s2 += z * z * g;
            }
        }
        let norm = Complex64::new(0.0, 2.0 * PI);
        Ok((s1 / norm, s2 / norm))
    }

    fn newton(&self, mut z: Complex64, cell: &Cell) -> Result<Complex64> {
        for _ in 0..30 {
            let v = (self.f)(z)?;
            if v == Complex64::new(0.0, 0.0) {
                break;
            }
            let step = v / self.derivative(z)?;
            z -= step;
            if step.norm() < 1e-14 * z.norm().max(1.0) {
                break;
            }
        }
        let slack = 1e-6;
        let grown = Cell { re: (cell.re.0 - slack, cell.re.1 + slack), im: (cell.im.0 - slack, cell.im.1 + slack) };
        if !grown.contains(z) {
            return Err(Error::Refinement(format!("Newton polish left the cell {cell:?}")));
        }
        Ok(z)
    }

    fn roots(&self, cell: &Cell, count: i64, depth: usize) -> Result<Vec<OracleRoot>> {
        match count {
            0 => Ok(Vec::new()),
            1 => {
                let (s1, _) = self.moments(cell)?;
                Ok(vec![OracleRoot { lambda: self.newton(s1, cell)?, multiplicity: 1 }])
            }
            2 => {
                let (s1, s2) = self.moments(cell)?;
                let disc = (2.0 * s2 - s1 * s1).sqrt();
                if disc.norm() < 1e-4 * s1.norm().max(1.0) {
                    return Ok(vec![OracleRoot { lambda: 0.5 * s1, multiplicity: 2 }]);
                }
                let z1 = self.newton(0.5 * (s1 + disc), cell)?;
                let z2 = self.newton(0.5 * (s1 - disc), cell)?;
                Ok(vec![OracleRoot { lambda: z1, multiplicity: 1 }, OracleRoot { lambda: z2, multiplicity: 1 }])
            }
            _ => {
                if depth >= 4 {
                    return Err(Error::Refinement(format!("{count} zeros unresolved in {cell:?}")));
                }
                let subs = cell.split(2, 2);
                let mut found = Vec::new();
                let mut sum = 0;
                for sub in &subs {
                    let w = self.winding(sub)?;
                    sum += w;
                    found.extend(self.roots(sub, w, depth + 1)?);
                }
                if sum != count {
                    return Err(Error::Refinement(format!("winding {count} on {cell:?} but {sum} over its quarters")));
                }
                Ok(found)
            }
        }
    }
}

/// Resonances of mode m inside `window` with multiplicities.
///
/// The window is cut into `cells_re × cells_im` cells; cell edges must stay
/// away from resonances. Winding numbers of the cells must add up to the
/// winding over the whole window.
pub fn wronskian_oracle(
    m: i64,
    circumference: f64,
    bc: Bc,
    window: Cell,
    opts: &OracleOptions,
    exec: Exec,
) -> Result<Vec<OracleRoot>> {
    if !(window.re.0 < window.re.1 && window.im.0 < window.im.1) {
        return Err(Error::Config(format!("degenerate oracle window {window:?}")));
    }
    let f = |z: Complex64| connection_function(z, m, circumference, bc, opts);
    let finder = Finder { f: &f, opts };
    let total = finder.winding(&window)?;
    let cells = window.split(opts.cells_re.max(1), opts.cells_im.max(1));
    let per_cell = exec.map(cells, |cell| {
        let finder = Finder { f: &f, opts };
        let w = finder.winding(&cell)?;
        Ok::<_, Error>((w, finder.roots(&cell, w, 0)?))
    });
    let mut sum = 0;
    let mut roots = Vec::new();
    for r in per_cell {
        let (w, found) = r?;
        sum += w;
        roots.extend(found);
    }
    if sum != total {
        return Err(Error::Refinement(format!("window winding {total} but cells sum to {sum}")));
    }
    roots.sort_by(|a, b| b.lambda.im.total_cmp(&a.lambda.im).then(a.lambda.re.total_cmp(&b.lambda.re)));
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((integral - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn series_matches_integration() {
        // continuing the series to 0.3 by ODE agrees with summing it there
        let lam = Complex64::new(0.4, -0.7);
        let a = 0.2;
        let (v5, dv5) = boundary_series(lam, a, 0.5, 120);
        let (v3, dv3) = boundary_series(lam, a, 0.3, 120);
        let i = Complex64::new(0.0, 1.0);
        let k0 = 0.25 + a - i * lam - lam * lam;
        let y = dopri5(
            |x, y, dy| {
                let opx = 1.0 + x;
                dy[0] = y[1];
                dy[1] = -((-opx * opx + i * lam * (1.0 - x * x)) * y[1] + k0 * y[0]) / (-x * opx * opx);
            },
            0.3,
            0.5,
            &[v3, dv3],
            &OdeOptions::default(),
        )
        .unwrap();
        assert!((y[0] - v5).norm() < 1e-10 * v5.norm());
        assert!((y[1] - dv5).norm() < 1e-10 * dv5.norm());
    }
}
