use serde::{Deserialize, Serialize};

use super::RadialError;
use crate::real::Real;

/// Left knot of the cutoff: χ ≡ 1 on `[0, A]`.
pub const KNOT_A: f64 = 0.5;
/// Right knot of the cutoff: χ ≡ 0 on `[B, 2]`.
pub const KNOT_B: f64 = 1.0;

/// Warping function `d(x) = (1 - x²/4)² + c χ(x) x^(2k+1)` on `(0, 2)`.
///
/// `x = 0` is the boundary at infinity and `x = 2` the center of the ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub n: u32,
    pub k: u32,
    pub c: f64,
}

impl RadialProfile {
    pub fn new(n: u32, k: u32, c: f64) -> Result<Self, RadialError> {
        if n == 0 {
            return Err(RadialError::InvalidProfile("n must be at least 1".into()));
        }
        if !(c >= 0.0 && c.is_finite()) {
            return Err(RadialError::InvalidProfile(format!("amplitude must be finite and nonnegative, got {c}")));
        }
        Ok(RadialProfile { n, k, c })
    }

    /// The unperturbed ball.
    pub fn hyperbolic(n: u32) -> Self {
        RadialProfile { n, k: 0, c: 0.0 }
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.c == 0.0
    }

    /// Taylor coefficients of `d` on the polynomial branch `x ≤ 1/2`.
    pub fn boundary_coeffs(&self) -> Vec<f64> {
        let odd = 2 * self.k as usize + 1;
        let mut d = vec![1.0, 0.0, -0.5, 0.0, 1.0 / 16.0];
        if self.c != 0.0 {
            if d.len() <= odd {
                d.resize(odd + 1, 0.0);
            }
            d[odd] += self.c;
        }
        d
    }

    /// `(d, d')` without the domain check.
    pub fn eval_unchecked<T: Real>(&self, x: T) -> (T, T) {
        let one = T::one();
        let q = one - x * x * T::from_f64(0.25);
        let base = q * q;
        let dbase = -x * q;
        if self.c == 0.0 || x.to_f64() >= KNOT_B {
            return (base, dbase);
        }
        let c = T::from_f64(self.c);
        let p = 2 * self.k as i32 + 1;
        let xp = x.powi(p);
        let dxp = T::from_i64(p as i64) * x.powi(p - 1);
        if x.to_f64() <= KNOT_A {
            return (base + c * xp, dbase + c * dxp);
        }
        let (chi, dchi) = cutoff(x);
        (base + c * chi * xp, dbase + c * (dchi * xp + chi * dxp))
    }
}

/// `η(t) = exp(-1/t)` and `η'(t) = η(t)/t²` for `t > 0`, zero otherwise.
fn eta<T: Real>(t: T) -> (T, T) {
    if t.to_f64() <= 0.0 {
        return (T::zero(), T::zero());
    }
    let e = (-(T::one() / t)).exp();
    (e, e / (t * t))
}

/// `χ(x) = σ(2(1-x))` with `σ(t) = η(t)/(η(t) + η(1-t))`, and `dχ/dx`.
fn cutoff<T: Real>(x: T) -> (T, T) {
    let one = T::one();
    let t = (one - x).mul_pow2(1);
    let (a, da) = eta(t);
    let (b, db) = eta(one - t);
    let sum = a + b;
    let sigma = a / sum;
    // σ' = (a' b + a b') / (a + b)²
    let dsigma = (da * b + a * db) / (sum * sum);
    (sigma, -dsigma.mul_pow2(1))
}

/// `(d(x), d'(x))` for `0 < x < 2`.
pub fn profile_eval<T: Real>(p: &RadialProfile, x: T) -> Result<(T, T), RadialError> {
    let xf = x.to_f64();
    if !(xf > 0.0 && xf < 2.0) {
        return Err(RadialError::DomainError(xf));
    }
    Ok(p.eval_unchecked(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::DoubleDouble;

    #[test]
    fn endpoint_values() {
        let p = RadialProfile::new(2, 0, 1.0).unwrap();
        let (d, _) = profile_eval(&p, 1e-9).unwrap();
        assert!((d - 1.0).abs() < 1e-8);
        let (d, dp) = profile_eval(&p, 2.0 - 1e-6).unwrap();
        assert!(d < 1e-11 && dp.abs() < 1e-5);
        let (d, _) = profile_eval(&p, 0.4).unwrap();
        assert!((d - 1.3216).abs() < 1e-15);
        assert!(matches!(profile_eval(&p, 2.0), Err(RadialError::DomainError(_))));
        assert!(matches!(profile_eval(&p, 0.0), Err(RadialError::DomainError(_))));
    }

    #[test]
    fn derivative_matches_difference_quotient_across_cutoff() {
        let p = RadialProfile::new(3, 1, 1.0).unwrap();
        for &x in &[0.3, 0.5, 0.55, 0.7, 0.9, 0.999, 1.2] {
            let h = 1e-5;
            let (dp_, _) = p.eval_unchecked(x + h);
            let (dm, _) = p.eval_unchecked(x - h);
            let (_, d1) = p.eval_unchecked(x);
            assert!(((dp_ - dm) / (2.0 * h) - d1).abs() < 1e-8, "x = {x}");
        }
    }

    #[test]
    fn cutoff_is_monotone_and_positive_profile() {
        let p = RadialProfile::new(2, 2, 1.0).unwrap();
        let mut prev = 1.0;
        for i in 1..200 {
            let x = 0.5 + 0.5 * i as f64 / 200.0;
            let (chi, dchi) = cutoff(x);
            assert!(chi <= prev + 1e-15 && dchi <= 0.0);
            prev = chi;
            assert!(p.eval_unchecked(x).0 > 0.0);
        }
    }

    #[test]
    fn high_precision_branch_agrees() {
        let p = RadialProfile::new(2, 0, 1.0).unwrap();
        let (d, dp) = p.eval_unchecked(DoubleDouble::from_f64(0.75));
        let (df, dpf) = p.eval_unchecked(0.75);
        assert!((d.to_f64() - df).abs() < 1e-15 && (dp.to_f64() - dpf).abs() < 1e-14);
    }
}
