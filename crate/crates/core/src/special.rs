//! Complex log-gamma and the closed forms built from it.

use std::f64::consts::PI;

use num_complex::Complex64;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
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

/// `ln Γ(z)` on some branch; differences exponentiate correctly.
///
/// Lanczos for `Re z ≥ 1/2`, reflection below.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let s = (Complex64::new(PI, 0.0) * z).sin();
        return Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut acc = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

/// `2^(n-2λ) Γ(n/2 - λ) / Γ(λ - n/2)`.
pub fn c_lambda(n: u32, lambda: Complex64) -> Complex64 {
    let h = n as f64 / 2.0;
    let log2 = (n as f64 - 2.0 * lambda) * std::f64::consts::LN_2;
    (log2 + ln_gamma(h - lambda) - ln_gamma(lambda - h)).exp()
}

/// Mode scattering coefficient of the hyperbolic ball with Frobenius
/// branches normalised to leading coefficient one:
/// `2^(n-2λ) Γ(n/2-λ) Γ(λ+l) / (Γ(λ-n/2) Γ(n-λ+l))`.
pub fn hyperbolic_mode_s(n: u32, l: u32, lambda: Complex64) -> Complex64 {
    let h = n as f64 / 2.0;
    let lf = l as f64;
    let log2 = (n as f64 - 2.0 * lambda) * std::f64::consts::LN_2;
    (log2 + ln_gamma(h - lambda) + ln_gamma(lambda + lf) - ln_gamma(lambda - h) - ln_gamma(n as f64 - lambda + lf)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gamma_at_known_points() {
        assert!((gamma(c(5.0, 0.0)) - c(24.0, 0.0)).norm() < 1e-11);
        assert!((gamma(c(0.5, 0.0)) - c(PI.sqrt(), 0.0)).norm() < 1e-14);
        assert!((gamma(c(-0.5, 0.0)) - c(-2.0 * PI.sqrt(), 0.0)).norm() < 1e-13);
        // |Γ(iy)|² = π / (y sinh πy)
        let y: f64 = 1.3;
        let g = gamma(c(0.0, y));
        assert!((g.norm_sqr() - PI / (y * (PI * y).sinh())).abs() < 1e-14);
    }

    #[test]
    fn recurrence_holds_off_axis() {
        for &z in &[c(0.3, 2.0), c(-2.7, 0.4), c(7.5, -3.0)] {
            let lhs = ln_gamma(z + 1.0) - ln_gamma(z) - z.ln();
            let k = (lhs.im / (2.0 * PI)).round();
            assert!((lhs - c(0.0, 2.0 * PI * k)).norm() < 1e-12, "{z}");
        }
    }

    #[test]
    fn c_lambda_values() {
        assert!((c_lambda(2, c(0.5, 0.0)) - c(-1.0, 0.0)).norm() < 1e-13);
        assert!((c_lambda(2, c(-0.5, 0.0)) - c(3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn hyperbolic_fixture_is_unitary_on_the_critical_line() {
        for l in [0, 3, 10] {
            let s = hyperbolic_mode_s(2, l, c(1.0, 2.0));
            assert!((s.norm() - 1.0).abs() < 1e-12);
            let s3 = hyperbolic_mode_s(3, l, c(1.5, 0.7));
            assert!((s3.norm() - 1.0).abs() < 1e-12);
        }
    }
}
