//! Exact rational-function coefficients of the conjugated funnel operator.
//!
//! Two independent constructions: conjugating the per-mode Laplacian by a
//! weight φ^{1/4 − iλ/2} (route A), and the closed-form modified operator
//! for n = 2 with γ = 1/(1+x) (route B, literal or corrected).

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Polynomial in x, coefficients in ascending order.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly(pub Vec<Complex64>);

impl Poly {
    pub fn constant(c: Complex64) -> Self {
        Poly(vec![c]).trim()
    }

    pub fn real(coeffs: &[f64]) -> Self {
        Poly(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect()).trim()
    }

    pub fn x() -> Self {
        Poly::real(&[0.0, 1.0])
    }

    fn trim(mut self) -> Self {
        while self.0.last() == Some(&ZERO) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.0.iter().rev().fold(ZERO, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Poly(self.0.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect()).trim()
    }

    fn low_order(&self) -> usize {
        self.0.iter().take_while(|&&c| c == ZERO).count()
    }

    fn shift_down(&self, k: usize) -> Self {
        Poly(self.0[k.min(self.0.len())..].to_vec())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Poly(self.0.iter().map(|&a| a * c).collect()).trim()
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly((0..n).map(|k| self.0.get(k).copied().unwrap_or(ZERO) + o.0.get(k).copied().unwrap_or(ZERO)).collect())
            .trim()
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly(self.0.iter().map(|&c| -c).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &(-o)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly(Vec::new());
        }
        let mut out = vec![ZERO; self.0.len() + o.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            for (j, &b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out).trim()
    }
}

/// num/den with common powers of x cancelled, so values at x = 0 are
/// the limits.
#[derive(Clone, Debug, PartialEq)]
pub struct Rational {
    pub num: Poly,
    pub den: Poly,
}

impl Rational {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Rational { num, den: Poly::real(&[1.0]) };
        }
        let k = num.low_order().min(den.low_order());
        Rational { num: num.shift_down(k), den: den.shift_down(k) }
    }

    pub fn poly(p: Poly) -> Self {
        Rational::new(p, Poly::real(&[1.0]))
    }

    pub fn constant(c: Complex64) -> Self {
        Rational::poly(Poly::constant(c))
    }

    pub fn zero() -> Self {
        Rational::poly(Poly(Vec::new()))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.num.eval(x) / self.den.eval(x)
    }

    pub fn derivative(&self) -> Self {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Rational::new(n, &self.den * &self.den)
    }

    pub fn recip(&self) -> Self {
        Rational::new(self.den.clone(), self.num.clone())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Rational::new(self.num.scale(c), self.den.clone())
    }
}

impl Add for &Rational {
    type Output = Rational;
    fn add(self, o: &Rational) -> Rational {
        if self.den == o.den {
            return Rational::new(&self.num + &o.num, self.den.clone());
        }
        Rational::new(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }
}

impl Sub for &Rational {
    type Output = Rational;
    fn sub(self, o: &Rational) -> Rational {
        self + &o.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &Rational {
    type Output = Rational;
    fn mul(self, o: &Rational) -> Rational {
        Rational::new(&self.num * &o.num, &self.den * &o.den)
    }
}

/// Coefficients of ∂², ∂ and 1, each split by powers of λ (index = power).
#[derive(Clone, Debug, PartialEq)]
pub struct AHPencilCoefficients {
    pub d2: [Rational; 3],
    pub d1: [Rational; 3],
    pub d0: [Rational; 3],
}

impl AHPencilCoefficients {
    /// Coefficient of ∂^order times λ^power at x.
    pub fn eval(&self, order: usize, power: usize, x: f64) -> Complex64 {
        let set = match order {
            2 => &self.d2,
            1 => &self.d1,
            _ => &self.d0,
        };
        set[power].eval(x)
    }

    /// Largest numerator or denominator degree; all terms are rational in x.
    pub fn max_degree(&self) -> usize {
        self.d2
            .iter()
            .chain(&self.d1)
            .chain(&self.d0)
            .flat_map(|r| [r.num.degree(), r.den.degree()])
            .flatten()
            .max()
            .unwrap_or(0)
    }
}

/// Weight φ in the route-A conjugation u = φ^{1/4 − iλ/2} v.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Weight {
    /// φ = 4x/(1+x)², smooth up to the neck.
    #[default]
    Compactified,
    /// φ = x; the λ² coefficient vanishes identically.
    PurePower,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Conjugated(Weight),
    PrintedLiteral,
    PrintedCorrected,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// m²/ℓ̃² for Fourier mode m on a cylinder of neck parameter ℓ̃.
pub fn angular_constant(m: i64, circumference: f64) -> f64 {
    (m as f64 / circumference).powi(2)
}

/// Route A: conjugate −A∂² − B∂ + V − ¼ − λ² by φ^{1/4 − iλ/2}, divide by φ.
fn conjugated(weight: Weight, a: f64) -> AHPencilCoefficients {
    let opx = Poly::real(&[1.0, 1.0]);
    let opx2 = &opx * &opx;
    let big_a = Rational::poly(Poly::real(&[0.0, 0.0, 4.0]));
    let big_b = Rational::new(&Poly::real(&[0.0, 2.0]) * &Poly::real(&[1.0, 3.0]), opx.clone());
    let v = Rational::new(Poly::real(&[0.0, 4.0 * a]), opx2.clone());
    let phi = match weight {
        Weight::Compactified => Rational::new(Poly::real(&[0.0, 4.0]), opx2),
        Weight::PurePower => Rational::poly(Poly::x()),
    };
    let psi = &phi.derivative() * &phi.recip();
    let dpsi = psi.derivative();
    let inv = phi.recip();
    let k = |re: f64, im: f64, r: &Rational| r.scale(c(re, im));
    let psi2 = &psi * &psi;

    let d2_0 = &k(-1.0, 0.0, &big_a) * &inv;
    let d1_0 = &(&k(-0.5, 0.0, &(&big_a * &psi)) - &big_b) * &inv;
    let d1_1 = &k(0.0, 1.0, &(&big_a * &psi)) * &inv;
    let d0_0 = {
        let t = &(&k(1.0 / 16.0, 0.0, &psi2) + &k(0.25, 0.0, &dpsi)) * &big_a;
        let t = &t + &k(0.25, 0.0, &(&big_b * &psi));
        let t = &(&v - &t) - &Rational::constant(c(0.25, 0.0));
        &t * &inv
    };
    let d0_1 = {
        let t = &(&k(0.25, 0.0, &psi2) + &k(0.5, 0.0, &dpsi)) * &big_a;
        let t = &t + &k(0.5, 0.0, &(&big_b * &psi));
        &k(0.0, 1.0, &t) * &inv
    };
    let d0_2 = &(&k(0.25, 0.0, &(&big_a * &psi2)) - &Rational::constant(c(1.0, 0.0))) * &inv;
    AHPencilCoefficients {
        d2: [d2_0, Rational::zero(), Rational::zero()],
        d1: [d1_0, d1_1, Rational::zero()],
        d0: [d0_0, d0_1, d0_2],
    }
}

/// Route B for n = 2, γ = 1/(1+x):
/// −x(1+x)²∂² + (1+x)((n−2−iλ)x + iλ − 1 − γx(1+x))∂
/// − ((n−1)/2 − iλ)(x(n−1)/2 + iλ − 1 + corr) + m²/ℓ̃².
fn printed(corrected: bool, a: f64) -> AHPencilCoefficients {
    let n = 2.0;
    let x = Poly::x();
    let opx = Poly::real(&[1.0, 1.0]);
    let gamma = Rational::new(Poly::real(&[1.0]), opx.clone());
    let xr = Rational::poly(x.clone());
    let opxr = Rational::poly(opx.clone());
    let omx = Rational::poly(Poly::real(&[1.0, -1.0]));
    let konst = |re: f64, im: f64| Rational::constant(c(re, im));

    let d2_0 = Rational::poly(&(&x * &opx) * &opx).scale(c(-1.0, 0.0));
    // ∂ coefficient: (1+x)[(n−2)x − 1 − γx(1+x)] + λ(1+x)(−ix + i)
    let gx1 = &(&gamma * &xr) * &opxr;
    let d1_0 = &opxr * &(&(&xr.scale(c(n - 2.0, 0.0)) - &konst(1.0, 0.0)) - &gx1);
    let d1_1 = &opxr * &(&xr.scale(c(0.0, -1.0)) + &konst(0.0, 1.0));
    // zero-order: −(p − iλ)(q + iλ) with p = (n−1)/2, q = x(n−1)/2 − 1 + corr
    let corr = if corrected {
        (&(&gamma * &opxr) * &omx).scale(c(0.5, 0.0))
    } else {
        (&(&(&gamma * &xr) * &opxr) * &omx).scale(c(-0.5, 0.0))
    };
    let p = (n - 1.0) / 2.0;
    let q = &(&xr.scale(c(p, 0.0)) - &konst(1.0, 0.0)) + &corr;
    // −(p − iλ)(q + iλ) = −pq + λ(iq − ip) − λ²
    let d0_0 = &q.scale(c(-p, 0.0)) + &konst(a, 0.0);
    let d0_1 = &q.scale(c(0.0, 1.0)) - &konst(0.0, p);
    let d0_2 = konst(-1.0, 0.0);
    AHPencilCoefficients {
        d2: [d2_0, Rational::zero(), Rational::zero()],
        d1: [d1_0, d1_1, Rational::zero()],
        d0: [d0_0, d0_1, d0_2],
    }
}

/// Coefficients for mode m on the cylinder with neck parameter ℓ̃.
pub fn coefficients(route: Route, m: i64, circumference: f64) -> AHPencilCoefficients {
    let a = angular_constant(m, circumference);
    match route {
        Route::Conjugated(w) => conjugated(w, a),
        Route::PrintedLiteral => printed(false, a),
        Route::PrintedCorrected => printed(true, a),
    }
}

/// Largest coefficient discrepancy between two routes on `samples` points
/// of [0, x_max], over all derivative orders and λ powers.
pub fn compare_routes(r1: Route, r2: Route, m: i64, circumference: f64, x_max: f64, samples: usize) -> f64 {
    let c1 = coefficients(r1, m, circumference);
    let c2 = coefficients(r2, m, circumference);
    let mut worst = 0.0f64;
    for s in 0..samples {
        let x = x_max * s as f64 / (samples.max(2) - 1) as f64;
        for order in 0..3 {
            for power in 0..3 {
                worst = worst.max((c1.eval(order, power, x) - c2.eval(order, power, x)).norm());
            }
        }
    }
    worst
}
