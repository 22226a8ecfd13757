//! Schwarzschild–de Sitter background: metric function, horizons, the
//! conjugation profile and the scalar coefficient functions of the pencil.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdSParams {
    pub mass: f64,
    pub lambda: f64,
}

impl SdSParams {
    pub fn new(mass: f64, lambda: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Config(format!("mass must be positive, got {mass}")));
        }
        if !(lambda > 0.0 && lambda * 9.0 * mass * mass < 1.0) {
            return Err(Error::Config(format!(
                "need 0 < lambda < 1/(9 mass^2), got lambda={lambda}, mass={mass}"
            )));
        }
        Ok(Self { mass, lambda })
    }

    /// μ = (9M²Λ)^{1/3}.
    pub fn mu(&self) -> f64 {
        (9.0 * self.mass * self.mass * self.lambda).cbrt()
    }

    /// 1 − μ, the maximum of G on the exterior region.
    pub fn beta(&self) -> f64 {
        1.0 - self.mu()
    }

    fn r_g(&self, r: f64) -> f64 {
        r - self.lambda * r * r * r / 3.0 - 2.0 * self.mass
    }

    fn r_g_prime(&self, r: f64) -> f64 {
        1.0 - self.lambda * r * r
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Horizons {
    pub r_minus: f64,
    pub r_plus: f64,
}

impl Horizons {
    pub fn width(&self) -> f64 {
        self.r_plus - self.r_minus
    }
}

/// G(r) = 1 − Λr²/3 − 2M/r.
pub fn metric_function(r: f64, p: &SdSParams) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("metric function needs r > 0, got {r}")));
    }
    Ok(1.0 - p.lambda * r * r / 3.0 - 2.0 * p.mass / r)
}

pub fn metric_derivative(r: f64, p: &SdSParams) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("metric function needs r > 0, got {r}")));
    }
    Ok(-2.0 * p.lambda * r / 3.0 + 2.0 * p.mass / (r * r))
}

pub fn metric_second_derivative(r: f64, p: &SdSParams) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("metric function needs r > 0, got {r}")));
    }
    Ok(-2.0 * p.lambda / 3.0 - 4.0 * p.mass / (r * r * r))
}

/// G from the factored cubic, exact zeros at both horizons and no
/// cancellation near them.
pub(crate) fn metric_factored(r: f64, p: &SdSParams, h: &Horizons) -> f64 {
    (p.lambda / (3.0 * r)) * (r - h.r_minus) * (h.r_plus - r) * (r + h.r_minus + h.r_plus)
}

fn refine_root(p: &SdSParams, mut lo: f64, mut hi: f64) -> f64 {
    let f_lo = p.r_g(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (p.r_g(mid) < 0.0) == (f_lo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let mut r = 0.5 * (lo + hi);
    for _ in 0..4 {
        let d = p.r_g_prime(r);
        if d == 0.0 {
            break;
        }
        let step = p.r_g(r) / d;
        let next = r - step;
        if !(next > lo - (hi - lo) && next < hi + (hi - lo)) {
            break;
        }
        r = next;
    }
    r
}

/// The two positive roots r₋ < r₊ of rG(r).
pub fn horizon_roots(p: &SdSParams) -> Result<Horizons> {
    let m = p.mass;
    let extremal = 1.0 / (9.0 * m * m);
    if (p.lambda - extremal).abs() < 1e-10 {
        return Err(Error::Degenerate(format!(
            "lambda={} is within 1e-10 of 1/(9M^2); horizons merge at r=3M",
            p.lambda
        )));
    }
    let r_max = (3.0 / p.lambda).sqrt();
    let r_minus = refine_root(p, 2.0 * m, 3.0 * m);
    let r_plus = refine_root(p, 3.0 * m, r_max);
    Ok(Horizons { r_minus, r_plus })
}

/// (κ₋, κ₊) = (G′(r₋)/2, −G′(r₊)/2).
pub fn surface_gravities(p: &SdSParams, h: &Horizons) -> (f64, f64) {
    let gm = -2.0 * p.lambda * h.r_minus / 3.0 + 2.0 * p.mass / (h.r_minus * h.r_minus);
    let gp = -2.0 * p.lambda * h.r_plus / 3.0 + 2.0 * p.mass / (h.r_plus * h.r_plus);
    (0.5 * gm, -0.5 * gp)
}

/// Profile ρ: [r₋, r₊] → [−1, 1] entering F′ = ρ(1/G − 1/(2(1−μ))).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RhoProfile {
    /// ρ = −cos(πφ(s)), φ(s) = s + b·sin(2πs)/(2π), s = (r−r₋)/(r₊−r₋).
    Analytic { warp: f64 },
    /// ρ ≡ −1 on the first `fraction` of the interval, ≡ +1 on the last,
    /// joined by a smoothstep of continuity class C^order.
    Plateau { fraction: f64, order: u32 },
}

impl Default for RhoProfile {
    fn default() -> Self {
        RhoProfile::Analytic { warp: 0.0 }
    }
}

impl RhoProfile {
    pub fn plateau(fraction: f64) -> Self {
        RhoProfile::Plateau { fraction, order: 2 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            RhoProfile::Analytic { warp } if warp.abs() < 1.0 => Ok(()),
            RhoProfile::Analytic { warp } => {
                Err(Error::Config(format!("analytic profile needs |warp| < 1, got {warp}")))
            }
            RhoProfile::Plateau { fraction, order } => {
                if !(fraction > 0.0 && fraction < 0.5) {
                    return Err(Error::Config(format!("plateau fraction {fraction} not in (0, 0.5)")));
                }
                if !(1..=3).contains(&order) {
                    return Err(Error::Config(format!("smoothstep order {order} not in 1..=3")));
                }
                Ok(())
            }
        }
    }

    /// (ρ, dρ/ds, 1 − ρ²) at normalized position s; s may leave [0, 1]
    /// slightly for the symbol checks.
    pub(crate) fn eval(&self, s: f64) -> (f64, f64, f64) {
        match *self {
            RhoProfile::Analytic { warp } => {
                let tau = 2.0 * PI * s;
                let phi = s + warp * tau.sin() / (2.0 * PI);
                let dphi = 1.0 + warp * tau.cos();
                let (sn, cs) = (PI * phi).sin_cos();
                (-cs, PI * sn * dphi, sn * sn)
            }
            RhoProfile::Plateau { fraction, order } => {
                let width = 1.0 - 2.0 * fraction;
                let t = ((s - fraction) / width).clamp(0.0, 1.0);
                let (h, dh) = smoothstep(t, order);
                let dh = if s > fraction && s < 1.0 - fraction { dh / width } else { 0.0 };
                (2.0 * h - 1.0, 2.0 * dh, 4.0 * h * (1.0 - h))
            }
        }
    }
}

/// Polynomial smoothstep of class C^order on [0, 1] and its derivative.
pub(crate) fn smoothstep(t: f64, order: u32) -> (f64, f64) {
    let t = t.clamp(0.0, 1.0);
    match order {
        1 => (t * t * (3.0 - 2.0 * t), 6.0 * t * (1.0 - t)),
        2 => (
            t * t * t * (10.0 - 15.0 * t + 6.0 * t * t),
            30.0 * t * t * (1.0 - t) * (1.0 - t),
        ),
        _ => (
            t.powi(4) * (35.0 - 84.0 * t + 70.0 * t * t - 20.0 * t * t * t),
            140.0 * t.powi(3) * (1.0 - t).powi(3),
        ),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Conjugation {
    /// Raw F′; `None` at the horizons, where it is infinite.
    pub fprime: Option<f64>,
    pub gfprime: f64,
    pub gfprime_deriv: f64,
    pub lambda2_coeff: f64,
}

/// Conjugation quantities without the domain check; valid a little beyond
/// the horizons as long as r stays positive.
pub(crate) fn conjugation_extended(r: f64, p: &SdSParams, h: &Horizons, rho: &RhoProfile) -> Conjugation {
    let beta = p.beta();
    let width = h.width();
    let s = (r - h.r_minus) / width;
    let g = metric_factored(r, p, h);
    let gp = -2.0 * p.lambda * r / 3.0 + 2.0 * p.mass / (r * r);
    let (rv, drv, one_minus_sq) = rho.eval(s);
    let drv = drv / width;
    let gfprime = rv * (1.0 - g / (2.0 * beta));
    let gfprime_deriv = drv * (1.0 - g / (2.0 * beta)) - rv * gp / (2.0 * beta);
    // (1 − ρ²)/G → 0 at the horizons: numerator is O(s²), G is O(s).
    let singular_part = if g == 0.0 { 0.0 } else { one_minus_sq / g };
    let lambda2_coeff = singular_part + rv * rv * (1.0 / beta - g / (4.0 * beta * beta));
    let fprime = if g == 0.0 { None } else { Some(rv / g - rv / (2.0 * beta)) };
    Conjugation { fprime, gfprime, gfprime_deriv, lambda2_coeff }
}

/// F′, GF′, (GF′)′ and (1 − (GF′)²)/G at r ∈ [r₋, r₊].
pub fn conjugation_profile(r: f64, p: &SdSParams, h: &Horizons, rho: &RhoProfile) -> Result<Conjugation> {
    let slack = 1e-12 * h.r_plus;
    if !(r >= h.r_minus - slack && r <= h.r_plus + slack) {
        return Err(Error::Domain(format!(
            "r={r} outside [{}, {}]",
            h.r_minus, h.r_plus
        )));
    }
    let r = r.clamp(h.r_minus, h.r_plus);
    Ok(conjugation_extended(r, p, h, rho))
}

/// Raw F′(r), refusing the horizons.
pub fn raw_fprime(r: f64, p: &SdSParams, h: &Horizons, rho: &RhoProfile) -> Result<f64> {
    conjugation_profile(r, p, h, rho)?
        .fprime
        .ok_or_else(|| Error::Singular(format!("F' is singular at the horizon r={r}")))
}

/// √(1 − 9ΛM²)/(3√3 M): leading real-part spacing per unit ℓ from the
/// unstable photon orbit.
pub fn photon_sphere_estimate(p: &SdSParams) -> f64 {
    (1.0 - 9.0 * p.lambda * p.mass * p.mass).sqrt() / (3.0 * 3f64.sqrt() * p.mass)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// Re λ ≈ c(ℓ + ½).
    OneTerm,
    /// Re λ ≈ c(ℓ + ½) + b/(ℓ + ½).
    #[default]
    TwoTerm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhotonFit {
    pub model: FitModel,
    pub c: f64,
    pub b: f64,
    pub relative_residual: f64,
    pub ells: Vec<u32>,
}

/// Fits the real-part growth of the least-damped mode per ℓ ≥ `ell_min`.
///
/// `entries` holds accepted (ℓ, λ) pairs; for each ℓ the mode with
/// Re λ > 0 closest to the real axis is used.
pub fn photon_constant_fit(entries: &[(u32, Complex64)], ell_min: u32, model: FitModel) -> Result<PhotonFit> {
    let mut best: std::collections::BTreeMap<u32, Complex64> = Default::default();
    for &(ell, z) in entries {
        if ell < ell_min || !(z.re > 0.0) {
            continue;
        }
        best.entry(ell)
            .and_modify(|w| {
                if z.im.abs() < w.im.abs() {
                    *w = z
                }
            })
            .or_insert(z);
    }
    if best.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "photon constant fit needs 3 distinct ell values, have {}",
            best.len()
        )));
    }
    let ells: Vec<u32> = best.keys().copied().collect();
    let xs: Vec<f64> = ells.iter().map(|&l| l as f64 + 0.5).collect();
    let ys: Vec<f64> = best.values().map(|z| z.re).collect();
    let (c, b) = match model {
        FitModel::OneTerm => {
            let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
            let sxx: f64 = xs.iter().map(|x| x * x).sum();
            (sxy / sxx, 0.0)
        }
        FitModel::TwoTerm => {
            // normal equations for basis {x, 1/x}
            let (mut s11, mut s12, mut s22, mut t1, mut t2) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for (x, y) in xs.iter().zip(&ys) {
                let (f1, f2) = (*x, 1.0 / x);
                s11 += f1 * f1;
                s12 += f1 * f2;
                s22 += f2 * f2;
                t1 += f1 * y;
                t2 += f2 * y;
            }
            let det = s11 * s22 - s12 * s12;
            ((t1 * s22 - t2 * s12) / det, (s11 * t2 - s12 * t1) / det)
        }
    };
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - c * x - b / x).powi(2)).sum();
    let den: f64 = ys.iter().map(|y| y * y).sum();
    Ok(PhotonFit { model, c, b, relative_residual: (num / den).sqrt(), ells })
}
