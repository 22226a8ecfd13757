//! Reciprocal gamma function on the complex plane.

use std::f64::consts::PI;

use num_complex::Complex64;

const G: f64 = 7.0;
const COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn ln_gamma_right(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut x = Complex64::new(COEF[0], 0.0);
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

/// 1/Γ(z), entire; exact zeros at z = 0, −1, −2, …
pub fn rgamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        if z.im == 0.0 && z.re == z.re.round() {
            return Complex64::new(0.0, 0.0);
        }
        // 1/Γ(z) = sin(πz)Γ(1−z)/π
        (PI * z).sin() / PI * ln_gamma_right(1.0 - z).exp()
    } else {
        (-ln_gamma_right(z)).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_and_half_values() {
        assert!((rgamma(Complex64::new(5.0, 0.0)) - 1.0 / 24.0).norm() < 1e-14);
        assert!((rgamma(Complex64::new(0.5, 0.0)).re - 1.0 / PI.sqrt()).abs() < 1e-14);
        assert_eq!(rgamma(Complex64::new(-3.0, 0.0)), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn recurrence_off_axis() {
        for z in [Complex64::new(0.3, 1.7), Complex64::new(-2.4, -0.9), Complex64::new(4.1, 3.0)] {
            // 1/Γ(z) = z/Γ(z+1)
            let lhs = rgamma(z);
            let rhs = z * rgamma(z + 1.0);
            assert!((lhs - rhs).norm() < 1e-13 * lhs.norm().max(1.0), "{z}");
        }
    }
}
