//! Exact coefficient algebra for the symbolic engine.
//!
//! [`Poly`] and [`RatFunc`] are univariate in the spectral parameter λ over
//! big rationals. [`BoundaryOp`] is a polynomial in the central symbol `L`
//! (the boundary Laplacian) with [`RatFunc`] coefficients. [`XSeries`] is a
//! truncated power series in `x` over any [`Coeff`] ring.

mod boundary_op;
mod poly;
mod ratfunc;
mod series;

pub use boundary_op::BoundaryOp;
pub use poly::Poly;
pub use ratfunc::{laurent_coeff, normalize_ratfunc, RatFunc};
pub use series::{series_reciprocal, XSeries};

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("leading coefficient of the series is not invertible")]
    NonInvertibleLeadingTerm,
    #[error("cannot parse rational `{0}`")]
    Parse(String),
}

/// Commutative ring operations used by [`XSeries`].
///
/// Method names avoid clashing with `std::ops`, which the concrete types also
/// implement for ergonomic use.
pub trait Coeff: Clone + PartialEq + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    /// Multiplicative inverse when it exists in the ring.
    fn inverse(&self) -> Option<Self>;
    fn from_rational(q: &Rational) -> Self;
}

impl Coeff for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
}

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Parses `"p/q"`, `"p"` or a plain decimal such as `"0.25"` (read exactly).
pub fn parse_rational(s: &str) -> Result<Rational, RingError> {
    let t = s.trim();
    if let Ok(q) = t.parse::<Rational>() {
        return Ok(q);
    }
    if let Some((whole, frac)) = t.split_once('.') {
        let neg = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        if !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit()) {
            let num: BigInt = digits.parse().map_err(|_| RingError::Parse(s.into()))?;
            let den = num_traits::pow(BigInt::from(10), frac.len());
            let q = Rational::new(num, den);
            return Ok(if neg { -q } else { q });
        }
    }
    Err(RingError::Parse(s.into()))
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("-1/2").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
    }
}
