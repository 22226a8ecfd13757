//! Reference computations shared by the integration tests. Nothing here
//! calls into the library's discretizations.

#![allow(dead_code)]

use resonances::Complex64;

type C = Complex64;

/// Real polynomial, ascending coefficients.
#[derive(Clone, Debug)]
struct P(Vec<f64>);

impl P {
    fn mul(&self, o: &P) -> P {
        let mut c = vec![0.0; self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        P(c)
    }

    fn add(&self, o: &P) -> P {
        let n = self.0.len().max(o.0.len());
        P((0..n).map(|i| self.0.get(i).unwrap_or(&0.0) + o.0.get(i).unwrap_or(&0.0)).collect())
    }

    fn scale(&self, s: f64) -> P {
        P(self.0.iter().map(|a| a * s).collect())
    }

    fn deriv(&self) -> P {
        if self.0.len() < 2 {
            return P(vec![0.0]);
        }
        P(self.0.iter().enumerate().skip(1).map(|(k, a)| k as f64 * a).collect())
    }

    fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, a| acc * x + a)
    }

    /// Coefficients of p(r0 + x) in x.
    fn shift(&self, r0: f64) -> P {
        let mut c = self.0.clone();
        let n = c.len();
        for k in 0..n {
            for j in (k..n - 1).rev() {
                c[j] += r0 * c[j + 1];
            }
        }
        P(c)
    }
}

/// Scalar wave equation on SdS, shot from both horizons.
pub struct SdsShooting {
    pub mass: f64,
    pub lambda_cc: f64,
    pub ell: u32,
    pub r_minus: f64,
    pub r_plus: f64,
    a: P,
    b: P,
    pp: P,
    r3: P,
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) == (flo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

impl SdsShooting {
    pub fn new(mass: f64, lambda_cc: f64, ell: u32) -> Self {
        // P = rG = r − Λr³/3 − 2M
        let pp = P(vec![-2.0 * mass, 1.0, 0.0, -lambda_cc / 3.0]);
        let r = P(vec![0.0, 1.0]);
        let r_minus = bisect(|x| pp.eval(x), 2.0 * mass, 3.0 * mass);
        let r_plus = bisect(|x| pp.eval(x), 3.0 * mass, (3.0 / lambda_cc).sqrt());
        let a = r.mul(&pp).mul(&pp);
        let b = pp.mul(&pp).add(&r.mul(&pp).mul(&pp.deriv()));
        let r3 = r.mul(&r).mul(&r);
        Self { mass, lambda_cc, ell, r_minus, r_plus, a, b, pp, r3 }
    }

    fn c_poly(&self, lam: C) -> (P, P, C) {
        // C = λ² r³ − L P kept as (r³, P) with weights λ², −L
        (self.r3.clone(), self.pp.clone(), lam * lam)
    }

    fn coeffs(&self, r: f64, lam: C) -> (f64, f64, C) {
        let l = (self.ell * (self.ell + 1)) as f64;
        (self.a.eval(r), self.b.eval(r), lam * lam * self.r3.eval(r) - l * self.pp.eval(r))
    }

    /// (R, dR/dr) at r0 + x from the Frobenius series at horizon r0.
    fn frobenius(&self, r0: f64, x: f64, lam: C, terms: usize) -> (C, C) {
        let l = (self.ell * (self.ell + 1)) as f64;
        let a = self.a.shift(r0).0;
        let b = self.b.shift(r0).0;
        let (r3, pp, l2) = self.c_poly(lam);
        let r3 = r3.shift(r0).0;
        let pp = pp.shift(r0).0;
        let ck = |k: usize| l2 * r3.get(k).copied().unwrap_or(0.0) - l * pp.get(k).copied().unwrap_or(0.0);
        let ak = |k: usize| a.get(k).copied().unwrap_or(0.0);
        let bk = |k: usize| b.get(k).copied().unwrap_or(0.0);
        let dp = P(self.pp.0.clone()).deriv().eval(r0);
        let kappa = (dp / r0).abs() / 2.0;
        let alpha = -C::i() * lam / (2.0 * kappa);
        let indicial = |s: C| ak(2) * s * (s - 1.0) + bk(1) * s + ck(0);
        let mut coef = vec![C::new(1.0, 0.0)];
        for n in 1..terms {
            let mut sum = C::new(0.0, 0.0);
            for (j, aj) in coef.iter().enumerate() {
                let s = alpha + j as f64;
                sum += aj * (ak(n + 2 - j) * s * (s - 1.0) + bk(n + 1 - j) * s + ck(n - j));
            }
            coef.push(-sum / indicial(alpha + n as f64));
        }
        let mut v = C::new(0.0, 0.0);
        let mut dv = C::new(0.0, 0.0);
        let mut pw = 1.0;
        for (j, cj) in coef.iter().enumerate() {
            v += cj * pw;
            dv += cj * (alpha + j as f64) * pw / x;
            pw *= x;
        }
        let pref = C::new(x.abs(), 0.0).powc(alpha);
        (pref * v, pref * dv)
    }

    fn rk4(&self, lam: C, r0: f64, r1: f64, mut y: [C; 2], steps: usize) -> [C; 2] {
        let h = (r1 - r0) / steps as f64;
        let f = |r: f64, y: [C; 2]| {
            let (a, b, c) = self.coeffs(r, lam);
            [y[1], -(y[1] * b + y[0] * c) / a]
        };
        let mut r = r0;
        for _ in 0..steps {
            let k1 = f(r, y);
            let k2 = f(r + h / 2.0, [y[0] + k1[0] * (h / 2.0), y[1] + k1[1] * (h / 2.0)]);
            let k3 = f(r + h / 2.0, [y[0] + k2[0] * (h / 2.0), y[1] + k2[1] * (h / 2.0)]);
            let k4 = f(r + h, [y[0] + k3[0] * h, y[1] + k3[1] * h]);
            for i in 0..2 {
                y[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
            }
            r += h;
        }
        y
    }

    /// Wronskian of the two horizon-regular solutions at the midpoint.
    pub fn wronskian(&self, lam: C) -> C {
        let mid = 0.5 * (self.r_minus + self.r_plus);
        let x_in = 0.4;
        let x_out = -0.8;
        let (u, du) = self.frobenius(self.r_minus, x_in, lam, 90);
        let (v, dv) = self.frobenius(self.r_plus, x_out, lam, 90);
        let yl = self.rk4(lam, self.r_minus + x_in, mid, [u, du], 4000);
        let yr = self.rk4(lam, self.r_plus + x_out, mid, [v, dv], 4000);
        yl[0] * yr[1] - yl[1] * yr[0]
    }

    /// Secant iteration on the Wronskian.
    pub fn solve(&self, seed: C) -> C {
        let mut z0 = seed;
        let mut z1 = seed * C::new(1.0 + 1e-4, 1e-4);
        let mut f0 = self.wronskian(z0);
        for _ in 0..60 {
            let f1 = self.wronskian(z1);
            let z2 = z1 - f1 * (z1 - z0) / (f1 - f0);
            if (z2 - z1).norm() < 1e-14 * z2.norm() {
                return z2;
            }
            (z0, f0, z1) = (z1, f1, z2);
        }
        z1
    }
}

/// Deterministic complex matrix with entries uniform in the unit square.
pub fn random_matrix(seed: u64, n: usize) -> nalgebra::DMatrix<Complex64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    nalgebra::DMatrix::from_fn(n, n, |_, _| C::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0))
}
