use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{Coeff, RatFunc, Rational};

/// Polynomial in the boundary Laplacian symbol `L` with coefficients in λ.
///
/// `L` commutes with everything here (warped metrics only ever see
/// functions of one boundary operator), so this is an ordinary commutative
/// polynomial ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct BoundaryOp {
    coeffs: Vec<RatFunc>,
}

impl BoundaryOp {
    pub fn new(mut coeffs: Vec<RatFunc>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        BoundaryOp { coeffs }
    }

    pub fn zero() -> Self {
        BoundaryOp { coeffs: Vec::new() }
    }

    pub fn identity() -> Self {
        BoundaryOp::scalar(RatFunc::one())
    }

    pub fn scalar(c: RatFunc) -> Self {
        BoundaryOp::new(vec![c])
    }

    /// The symbol `L` itself.
    pub fn l() -> Self {
        BoundaryOp::new(vec![RatFunc::zero(), RatFunc::one()])
    }

    pub fn coeffs(&self) -> &[RatFunc] {
        &self.coeffs
    }

    /// Coefficient of `L^i`.
    pub fn coeff(&self, i: usize) -> RatFunc {
        self.coeffs.get(i).cloned().unwrap_or_else(RatFunc::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, s: &RatFunc) -> BoundaryOp {
        BoundaryOp::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn scale_rational(&self, s: &Rational) -> BoundaryOp {
        BoundaryOp::new(self.coeffs.iter().map(|c| c.scale(s)).collect())
    }

    /// Multiplication by `L`.
    pub fn mul_l(&self) -> BoundaryOp {
        if self.is_zero() {
            return BoundaryOp::zero();
        }
        let mut c = Vec::with_capacity(self.coeffs.len() + 1);
        c.push(RatFunc::zero());
        c.extend(self.coeffs.iter().cloned());
        BoundaryOp { coeffs: c }
    }

    /// Applies `map` to every coefficient (e.g. a Laurent extraction).
    pub fn map_coeffs(&self, map: impl Fn(&RatFunc) -> RatFunc) -> BoundaryOp {
        BoundaryOp::new(self.coeffs.iter().map(map).collect())
    }
}

impl Add for &BoundaryOp {
    type Output = BoundaryOp;
    fn add(self, rhs: &BoundaryOp) -> BoundaryOp {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        BoundaryOp::new((0..n).map(|i| &self.coeff(i) + &rhs.coeff(i)).collect())
    }
}

impl Sub for &BoundaryOp {
    type Output = BoundaryOp;
    fn sub(self, rhs: &BoundaryOp) -> BoundaryOp {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        BoundaryOp::new((0..n).map(|i| &self.coeff(i) - &rhs.coeff(i)).collect())
    }
}

impl Mul for &BoundaryOp {
    type Output = BoundaryOp;
    fn mul(self, rhs: &BoundaryOp) -> BoundaryOp {
        if self.is_zero() || rhs.is_zero() {
            return BoundaryOp::zero();
        }
        let mut out = vec![RatFunc::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        BoundaryOp::new(out)
    }
}

impl Neg for &BoundaryOp {
    type Output = BoundaryOp;
    fn neg(self) -> BoundaryOp {
        BoundaryOp::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Coeff for BoundaryOp {
    fn zero() -> Self {
        BoundaryOp::zero()
    }
    fn one() -> Self {
        BoundaryOp::identity()
    }
    fn is_zero(&self) -> bool {
        BoundaryOp::is_zero(self)
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
    /// Only nonzero scalars (L-degree 0) are units.
    fn inverse(&self) -> Option<Self> {
        match self.degree() {
            Some(0) => self.coeffs[0].recip().ok().map(BoundaryOp::scalar),
            _ => None,
        }
    }
    fn from_rational(q: &Rational) -> Self {
        BoundaryOp::scalar(RatFunc::constant(q.clone()))
    }
}

impl fmt::Display for BoundaryOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "[{c}]")?,
                1 => write!(f, "[{c}]L")?,
                _ => write!(f, "[{c}]L^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::int;

    #[test]
    fn l_arithmetic() {
        let l = BoundaryOp::l();
        let one = BoundaryOp::identity();
        let a = &l + &one;
        let b = &l - &one;
        let prod = &a * &b;
        // L^2 - 1
        assert_eq!(prod.degree(), Some(2));
        assert_eq!(prod.coeff(1), RatFunc::zero());
        assert_eq!(prod.coeff(0), RatFunc::constant(int(-1)));
        assert_eq!(l.mul_l(), &l * &l);
        assert!((&a - &a).is_zero());
        assert_eq!(Coeff::inverse(&l), None);
        assert_eq!(Coeff::inverse(&BoundaryOp::from_rational(&int(2))).unwrap().coeff(0), RatFunc::constant(crate::ring::rat(1, 2)));
    }
}
