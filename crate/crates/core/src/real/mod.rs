//! Scalar types for the numeric engines.
//!
//! Everything in [`crate::radial`] is generic over [`Real`], so one code path
//! runs in hardware doubles, double-double or quad-double precision.
//! Transcendental functions have generic default implementations (argument
//! reduction plus Taylor series) that are accurate to the working precision
//! of whatever type provides the basic field operations; `f64` overrides them
//! with the standard library.

mod complex;
mod double_double;
mod quad_double;

use std::fmt::Debug;
use std::ops::{AddAssign, DivAssign, MulAssign, Neg, SubAssign};

use num_traits::Num;
use serde::{Deserialize, Serialize};

pub use complex::ComplexExt;
pub use double_double::DoubleDouble;
pub use quad_double::QuadDouble;

/// Working precision of a numeric computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    Double,
    Dd,
    Qd,
}

impl Precision {
    pub fn epsilon(self) -> f64 {
        match self {
            Precision::Double => <f64 as Real>::EPSILON,
            Precision::Dd => DoubleDouble::EPSILON,
            Precision::Qd => QuadDouble::EPSILON,
        }
    }

    pub fn next(self) -> Option<Precision> {
        match self {
            Precision::Double => Some(Precision::Dd),
            Precision::Dd => Some(Precision::Qd),
            Precision::Qd => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Precision::Double => "double",
            Precision::Dd => "dd",
            Precision::Qd => "qd",
        }
    }
}

impl std::str::FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "double" => Ok(Precision::Double),
            "dd" => Ok(Precision::Dd),
            "qd" => Ok(Precision::Qd),
            other => Err(format!("unknown precision `{other}` (expected double, dd or qd)")),
        }
    }
}

/// A real floating point field with enough structure for the radial solver.
pub trait Real:
    Copy
    + Debug
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Num
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
{
    /// Unit roundoff of the type.
    const EPSILON: f64;
    const PRECISION: Precision;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    /// Exact multiplication by `2^e`.
    fn mul_pow2(self, e: i32) -> Self;
    fn pi() -> Self;
    fn ln2() -> Self;

    fn from_i64(n: i64) -> Self {
        // i64 beyond 2^53 is split so the conversion stays exact.
        let hi = (n >> 26) << 26;
        Self::from_f64(hi as f64) + Self::from_f64((n - hi) as f64)
    }

    fn from_ratio(p: i64, q: i64) -> Self {
        Self::from_i64(p) / Self::from_i64(q)
    }

    fn is_finite(self) -> bool {
        self.to_f64().is_finite()
    }

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn powi(self, n: i32) -> Self {
        let mut base = if n < 0 { Self::one() / self } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }

    fn exp(self) -> Self {
        generic_exp(self)
    }

    fn ln(self) -> Self {
        generic_ln(self)
    }

    fn sin_cos(self) -> (Self, Self) {
        generic_sin_cos(self)
    }
}

impl Real for f64 {
    const EPSILON: f64 = f64::EPSILON / 2.0;
    const PRECISION: Precision = Precision::Double;

    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn mul_pow2(self, e: i32) -> Self {
        self * 2f64.powi(e)
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn ln2() -> Self {
        std::f64::consts::LN_2
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sin_cos(self) -> (Self, Self) {
        f64::sin_cos(self)
    }
}

/// `e^x` by reduction `x = k ln 2 + r`, `r / 2^8` through an `expm1`
/// Taylor series, then eight exact-ish squarings of `1 + p`.
fn generic_exp<T: Real>(x: T) -> T {
    let xf = x.to_f64();
    if xf == 0.0 {
        return T::one();
    }
    if xf > 709.0 {
        return T::from_f64(f64::INFINITY);
    }
    if xf < -745.0 {
        return T::zero();
    }
    const HALVINGS: i32 = 8;
    let k = (xf / std::f64::consts::LN_2).round();
    let r = (x - T::ln2() * T::from_f64(k)).mul_pow2(-HALVINGS);

    let eps = T::from_f64(T::EPSILON);
    let mut term = r;
    let mut p = r;
    let mut i = 1i64;
    loop {
        i += 1;
        term = term * r / T::from_i64(i);
        p += term;
        if term.abs() <= eps * p.abs() || i > 200 {
            break;
        }
    }
    // (1 + p)^2 - 1 = p (p + 2)
    let two = T::from_f64(2.0);
    for _ in 0..HALVINGS {
        p = p * (p + two);
    }
    (T::one() + p).mul_pow2(k as i32)
}

/// Natural log by Newton iteration on `exp`, seeded from the double value.
fn generic_ln<T: Real>(x: T) -> T {
    let xf = x.to_f64();
    if xf <= 0.0 {
        return T::from_f64(f64::NAN);
    }
    let mut y = T::from_f64(xf.ln());
    // Each step doubles the number of correct bits: 53 -> 106 -> 212.
    let steps = if T::EPSILON < 1e-40 { 3 } else { 2 };
    for _ in 0..steps {
        y = y + x * (-y).exp() - T::one();
    }
    y
}

fn generic_sin_cos<T: Real>(x: T) -> (T, T) {
    let xf = x.to_f64();
    if xf == 0.0 {
        return (T::zero(), T::one());
    }
    let half_pi = T::pi().mul_pow2(-1);
    let q = (xf / std::f64::consts::FRAC_PI_2).round();
    let r = x - half_pi * T::from_f64(q);

    let eps = T::from_f64(T::EPSILON);
    let r2 = r * r;
    // sin r
    let mut term = r;
    let mut s = r;
    let mut i = 1i64;
    loop {
        term = -term * r2 / T::from_i64((i + 1) * (i + 2));
        i += 2;
        s += term;
        if term.abs() <= eps * s.abs().max(eps) || i > 400 {
            break;
        }
    }
    // cos r
    let mut term = T::one();
    let mut c = T::one();
    let mut i = 0i64;
    loop {
        term = -term * r2 / T::from_i64((i + 1) * (i + 2));
        i += 2;
        c += term;
        if term.abs() <= eps || i > 400 {
            break;
        }
    }
    match (q as i64).rem_euclid(4) {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    }
}

/// `sum_j (-1)^j / ((2j+1) m^(2j+1))`, used to build constants at full width.
pub(crate) fn arctan_inverse<T: Real>(m: i64) -> T {
    let eps = T::from_f64(T::EPSILON);
    let m_t = T::from_i64(m);
    let m2 = m_t * m_t;
    let mut power = T::one() / m_t;
    let mut sum = power;
    let mut j = 0i64;
    loop {
        j += 1;
        power /= m2;
        let term = power / T::from_i64(2 * j + 1);
        if j % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        if term.abs() <= eps * sum.abs() {
            break;
        }
    }
    sum
}

/// `2 atanh(1/3) = ln 2`.
pub(crate) fn ln2_series<T: Real>() -> T {
    let eps = T::from_f64(T::EPSILON);
    let nine = T::from_f64(9.0);
    let mut power = T::one() / T::from_f64(3.0);
    let mut sum = power;
    let mut j = 0i64;
    loop {
        j += 1;
        power /= nine;
        let term = power / T::from_i64(2 * j + 1);
        sum += term;
        if term.abs() <= eps * sum.abs() {
            break;
        }
    }
    sum.mul_pow2(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn check_identities<T: Real>(tol: f64) {
        for &xf in &[0.3, 1.7, -2.25, 9.5, 40.0] {
            let x = T::from_f64(xf);
            let back = x.exp().ln();
            assert!((back - x).abs().to_f64() <= tol * xf.abs(), "{}: exp/ln at {xf}", T::PRECISION.as_str());
            let (s, c) = x.sin_cos();
            let one = s * s + c * c;
            assert!((one - T::one()).abs().to_f64() <= tol, "{}: sin^2+cos^2 at {xf}", T::PRECISION.as_str());
        }
        let (s, c) = T::pi().sin_cos();
        assert!(s.abs().to_f64() <= tol);
        assert!((c + T::one()).abs().to_f64() <= tol);
        let third = T::one() / T::from_f64(3.0);
        assert!((third * T::from_f64(3.0) - T::one()).abs().to_f64() <= tol);
        let r = T::from_f64(2.0).sqrt();
        assert!((r * r - T::from_f64(2.0)).abs().to_f64() <= tol);
    }

    #[test]
    fn f64_identities() {
        check_identities::<f64>(1e-14);
    }

    #[test]
    fn double_double_identities() {
        check_identities::<DoubleDouble>(1e-29);
    }

    #[test]
    fn quad_double_identities() {
        check_identities::<QuadDouble>(1e-59);
    }

    #[test]
    fn generic_exp_matches_std_in_f64() {
        for &x in &[-20.0, -1.0, 0.125, 3.0, 50.0] {
            let g = generic_exp(x);
            assert!((g - x.exp()).abs() <= 1e-13 * x.exp());
        }
        let (s, c) = generic_sin_cos(2.0f64);
        assert!((s - 2f64.sin()).abs() < 1e-15 && (c - 2f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn powi_and_ratio() {
        let x = DoubleDouble::from_f64(1.5);
        assert!((x.powi(-3) * x.powi(3) - DoubleDouble::one()).abs().to_f64() < 1e-30);
        assert_eq!(f64::from_ratio(3, 4), 0.75);
        let big = (1i64 << 60) + 7;
        let q = QuadDouble::from_i64(big) - QuadDouble::from_i64(1i64 << 60);
        assert_eq!(q.to_f64(), 7.0);
    }
}
