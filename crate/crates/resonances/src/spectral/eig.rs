//! Eigenvalues of a general dense complex matrix: diagonal balancing,
//! Householder reduction to Hessenberg form, then single-shift complex QR
//! with Wilkinson shifts and deflation.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct EigOptions {
    pub balance: bool,
    /// Total QR sweeps allowed, per matrix dimension.
    pub sweeps_per_dim: usize,
}

impl Default for EigOptions {
    fn default() -> Self {
        Self { balance: true, sweeps_per_dim: 30 }
    }
}

#[inline]
fn cabs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

pub fn eig_dense(m: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    eig_dense_with(m, EigOptions::default())
}

pub fn eig_dense_with(m: &DMatrix<Complex64>, opts: EigOptions) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::Config(format!("eigensolver needs a square matrix, got {}x{}", n, m.ncols())));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Domain("matrix has non-finite entries".into()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h: Vec<Complex64> = (0..n * n).map(|k| m[(k / n, k % n)]).collect();
    if opts.balance {
        balance(&mut h, n);
    }
    hessenberg(&mut h, n);
    hessenberg_qr(&mut h, n, opts.sweeps_per_dim * n.max(10))
}

fn balance(h: &mut [Complex64], n: usize) {
    const RADIX: f64 = 2.0;
    const SQRDX: f64 = RADIX * RADIX;
    let mut done = false;
    let mut passes = 0;
    while !done && passes < 100 {
        done = true;
        passes += 1;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += cabs1(h[j * n + i]);
                    r += cabs1(h[i * n + j]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= SQRDX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= SQRDX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    h[i * n + j] *= g;
                }
                for j in 0..n {
                    h[j * n + i] *= f;
                }
            }
        }
    }
}

fn hessenberg(h: &mut [Complex64], n: usize) {
    if n < 3 {
        return;
    }
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n - 2 {
        let len = n - k - 1;
        let norm = (0..len).map(|i| h[(k + 1 + i) * n + k].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1) * n + k];
        let phase = if x0.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        for i in 0..len {
            v[i] = h[(k + 1 + i) * n + k];
        }
        v[0] -= alpha;
        let vnorm2: f64 = v[..len].iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm2;
        for j in k..n {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..len {
                s += v[i].conj() * h[(k + 1 + i) * n + j];
            }
            s *= tau;
            for i in 0..len {
                h[(k + 1 + i) * n + j] -= v[i] * s;
            }
        }
        for i in 0..n {
            let row = &mut h[i * n + k + 1..i * n + n];
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..len {
                s += row[j] * v[j];
            }
            s *= tau;
            for j in 0..len {
                row[j] -= s * v[j].conj();
            }
        }
        h[(k + 1) * n + k] = alpha;
        for i in k + 2..n {
            h[i * n + k] = Complex64::new(0.0, 0.0);
        }
    }
}

/// Rotation [c, s; −s̄, c] mapping (x, y) to (r, 0).
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    if y == zero {
        return (1.0, zero, x);
    }
    let ay = y.norm();
    if x == zero {
        return (0.0, y.conj() / ay, Complex64::new(ay, 0.0));
    }
    let ax = x.norm();
    let nrm = ax.hypot(ay);
    let phase = x / ax;
    (ax / nrm, phase * y.conj() / nrm, phase * nrm)
}

fn hessenberg_qr(h: &mut [Complex64], n: usize, max_sweeps: usize) -> Result<Vec<Complex64>> {
    let ulp = f64::EPSILON;
    let smlnum = f64::MIN_POSITIVE * (n as f64 / ulp);
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let mut ihi = n as isize - 1;
    let mut its = 0usize;
    let mut sweeps = 0usize;
    let at = |h: &[Complex64], i: usize, j: usize| h[i * n + j];

    while ihi >= 0 {
        let i = ihi as usize;
        let mut l = 0usize;
        let mut k = i;
        while k > 0 {
            let sub = at(h, k, k - 1);
            if cabs1(sub) <= smlnum {
                h[k * n + k - 1] = Complex64::new(0.0, 0.0);
                l = k;
                break;
            }
            let mut tst = cabs1(at(h, k - 1, k - 1)) + cabs1(at(h, k, k));
            if tst == 0.0 {
                if k >= 2 {
                    tst += at(h, k - 1, k - 2).re.abs();
                }
                if k < i {
                    tst += at(h, k + 1, k).re.abs();
                }
            }
            if cabs1(sub) <= ulp * tst {
                // Ahues–Tisseur refinement of the deflation test
                let up = at(h, k - 1, k);
                let ab = cabs1(sub).max(cabs1(up));
                let ba = cabs1(sub).min(cabs1(up));
                let d0 = at(h, k, k);
                let d1 = at(h, k - 1, k - 1) - d0;
                let aa = cabs1(d0).max(cabs1(d1));
                let bb = cabs1(d0).min(cabs1(d1));
                let s = aa + ab;
                if ba * (ab / s) <= smlnum.max(ulp * (bb * (aa / s))) {
                    h[k * n + k - 1] = Complex64::new(0.0, 0.0);
                    l = k;
                    break;
                }
            }
            k -= 1;
        }

        if l == i {
            out[i] = at(h, i, i);
            ihi -= 1;
            its = 0;
            continue;
        }
        if sweeps >= max_sweeps {
            return Err(Error::NoConvergence { sweeps, total: n, deflated: out[i + 1..].to_vec() });
        }

        let shift = if its == 10 {
            Complex64::new(0.75 * at(h, l + 1, l).re.abs(), 0.0) + at(h, l, l)
        } else if its == 20 {
            Complex64::new(0.75 * at(h, i, i - 1).re.abs(), 0.0) + at(h, i, i)
        } else {
            wilkinson(at(h, i - 1, i - 1), at(h, i - 1, i), at(h, i, i - 1), at(h, i, i))
        };

        for k in l..i {
            let (x, y) = if k == l {
                (at(h, l, l) - shift, at(h, l + 1, l))
            } else {
                (at(h, k, k - 1), at(h, k + 1, k - 1))
            };
            let (c, s, r) = givens(x, y);
            let jstart = if k > l {
                h[k * n + k - 1] = r;
                h[(k + 1) * n + k - 1] = Complex64::new(0.0, 0.0);
                k
            } else {
                l
            };
            for j in jstart..=i {
                let a = h[k * n + j];
                let b = h[(k + 1) * n + j];
                h[k * n + j] = a * c + s * b;
                h[(k + 1) * n + j] = -s.conj() * a + b * c;
            }
            let rend = (k + 2).min(i);
            for row in l..=rend {
                let a = h[row * n + k];
                let b = h[row * n + k + 1];
                h[row * n + k] = a * c + b * s.conj();
                h[row * n + k + 1] = -a * s + b * c;
            }
        }
        its += 1;
        sweeps += 1;
    }
    Ok(out)
}

/// Eigenvalue of [[a, b], [c, d]] closest to d.
fn wilkinson(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let u = b.sqrt() * c.sqrt();
    let s = cabs1(u);
    if s == 0.0 {
        return d;
    }
    let x = (a - d) * 0.5;
    let sx = cabs1(x);
    let s = s.max(sx);
    let mut y = (((x / s) * (x / s)) + ((u / s) * (u / s))).sqrt() * s;
    if sx > 0.0 {
        let xs = x / sx;
        if xs.re * y.re + xs.im * y.im < 0.0 {
            y = -y;
        }
    }
    d - u * (u / (x + y))
}
