//! Adaptive Dormand–Prince 5(4) integrator for complex systems along a
//! real independent variable.

use num_complex::Complex64;

use crate::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub h0: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-14, max_steps: 200_000, h0: 1e-3 }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates y′ = f(t, y) from `t0` to `t1` and returns y(t1).
pub fn dopri5<F>(f: F, t0: f64, t1: f64, y0: &[Complex64], opts: &OdeOptions) -> Result<Vec<Complex64>>
where
    F: Fn(f64, &[Complex64], &mut [Complex64]),
{
    let n = y0.len();
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut h = opts.h0.min(span).max(span * 1e-12);
    let mut k: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); n]; 7];
    let mut tmp = vec![Complex64::new(0.0, 0.0); n];
    f(t, &y, &mut k[0]);
    for _ in 0..opts.max_steps {
        let remaining = (t1 - t) * dir;
        if remaining <= span * 1e-15 {
            return Ok(y);
        }
        h = h.min(remaining);
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for j in 0..s {
                    acc += k[j][i] * (A[s][j] * h * dir);
                }
                tmp[i] = acc;
            }
            f(t + C[s] * h * dir, &tmp, &mut k[s]);
        }
        let mut err = 0.0f64;
        let mut y5 = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut s5 = y[i];
            let mut e = Complex64::new(0.0, 0.0);
            for s in 0..7 {
                s5 += k[s][i] * (B5[s] * h * dir);
                e += k[s][i] * ((B5[s] - B4[s]) * h);
            }
            y5[i] = s5;
            let sc = opts.atol + opts.rtol * y[i].norm().max(s5.norm());
            err = err.max(e.norm() / sc);
        }
        if !err.is_finite() {
            return Err(Error::Refinement(format!("ODE solution became non-finite at t={t}")));
        }
        if err <= 1.0 {
            t += h * dir;
            y = y5;
            // first-same-as-last
            let last = k[6].clone();
            k[0] = last;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < span * 1e-14 {
            return Err(Error::Refinement(format!("ODE step size underflow at t={t}")));
        }
    }
    Err(Error::Refinement(format!("ODE integration exceeded {} steps", opts.max_steps)))
}
