use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{Poly, Rational, RingError};

/// Rational function of λ in canonical form: gcd-reduced with a monic
/// denominator, so structural equality is mathematical equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

/// Canonical representative of `p / q`.
pub fn normalize_ratfunc(p: Poly, q: Poly) -> Result<RatFunc, RingError> {
    if q.is_zero() {
        return Err(RingError::ZeroDenominator);
    }
    if p.is_zero() {
        return Ok(RatFunc::zero());
    }
    let g = p.gcd(&q);
    let (p, _) = p.div_rem(&g);
    let (q, _) = q.div_rem(&g);
    let lead_inv = q.lead().recip();
    Ok(RatFunc {
        num: p.scale(&lead_inv),
        den: q.scale(&lead_inv),
    })
}

impl RatFunc {
    pub fn new(p: Poly, q: Poly) -> Result<Self, RingError> {
        normalize_ratfunc(p, q)
    }

    pub fn zero() -> Self {
        RatFunc {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        RatFunc::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        RatFunc {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn lambda() -> Self {
        RatFunc::from_poly(Poly::lambda())
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The value if this is a constant function.
    pub fn as_constant(&self) -> Option<Rational> {
        match (self.num.degree(), self.den.degree()) {
            (None, _) => Some(Rational::zero()),
            (Some(0), Some(0)) => Some(self.num.coeff(0)),
            _ => None,
        }
    }

    /// `None` at a pole.
    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }

    pub fn is_regular_at(&self, x: &Rational) -> bool {
        !self.den.eval(x).is_zero()
    }

    pub fn pole_order(&self, x: &Rational) -> usize {
        self.den.root_multiplicity(x)
    }

    pub fn scale(&self, s: &Rational) -> RatFunc {
        if s.is_zero() {
            return RatFunc::zero();
        }
        RatFunc {
            num: self.num.scale(s),
            den: self.den.clone(),
        }
    }

    pub fn recip(&self) -> Result<RatFunc, RingError> {
        normalize_ratfunc(self.den.clone(), self.num.clone())
    }
}

/// Coefficient of `(λ - λ0)^(-p)` in the Laurent expansion of `f` at `λ0`.
pub fn laurent_coeff(f: &RatFunc, lambda0: &Rational, p: usize) -> Rational {
    assert!(p >= 1, "Laurent order must be at least 1");
    let num = f.num.shift(lambda0);
    let den = f.den.shift(lambda0);
    let q = den.coeffs().iter().take_while(|c| c.is_zero()).count();
    if q < p {
        return Rational::zero();
    }
    // f = t^(-q) num(t)/den1(t) with den1(0) != 0; we need [t^(q-p)] num/den1.
    let den1: Vec<Rational> = den.coeffs()[q..].to_vec();
    let target = q - p;
    let inv0 = den1[0].recip();
    let mut series: Vec<Rational> = Vec::with_capacity(target + 1);
    for i in 0..=target {
        let mut acc = num.coeff(i);
        for j in 1..=i.min(den1.len() - 1) {
            acc -= &den1[j] * &series[i - j];
        }
        series.push(acc * &inv0);
    }
    series.pop().unwrap_or_else(Rational::zero)
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.den == rhs.den {
            return normalize_ratfunc(&self.num + &rhs.num, self.den.clone()).expect("nonzero denominator");
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        normalize_ratfunc(num, &self.den * &rhs.den).expect("nonzero denominator")
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        normalize_ratfunc(&self.num * &rhs.num, &self.den * &rhs.den).expect("nonzero denominator")
    }
}

impl Div for &RatFunc {
    type Output = RatFunc;
    /// Panics on division by the zero function.
    fn div(self, rhs: &RatFunc) -> RatFunc {
        normalize_ratfunc(&self.num * &rhs.den, &self.den * &rhs.num).expect("division by zero rational function")
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl super::Coeff for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn one() -> Self {
        RatFunc::one()
    }
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
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
        self.recip().ok()
    }
    fn from_rational(q: &Rational) -> Self {
        RatFunc::constant(q.clone())
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == Poly::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{int, rat};

    fn p(cs: &[Rational]) -> Poly {
        Poly::new(cs.to_vec())
    }

    #[test]
    fn common_factor_cancels() {
        let f = normalize_ratfunc(p(&[int(-1), int(0), int(1)]), p(&[int(-1), int(1)])).unwrap();
        assert_eq!(f, RatFunc::from_poly(p(&[int(1), int(1)])));
    }

    #[test]
    fn reduced_input_is_unchanged() {
        let l0 = rat(3, 7);
        let f = normalize_ratfunc(Poly::one(), Poly::linear_root(&l0)).unwrap();
        assert_eq!(f.numerator(), &Poly::one());
        assert_eq!(f.denominator(), &Poly::linear_root(&l0));
    }

    #[test]
    fn evaluation_after_normalisation() {
        // (2 - λ) / (4 (λ - 3/2)) at 5/2
        let f = normalize_ratfunc(p(&[int(2), int(-1)]), p(&[int(-6), int(4)])).unwrap();
        assert_eq!(f.eval(&rat(5, 2)).unwrap(), rat(-1, 8));
        assert_eq!(f.denominator().lead(), int(1));
    }

    #[test]
    fn zero_denominator_is_rejected() {
        assert_eq!(normalize_ratfunc(Poly::one(), Poly::zero()), Err(RingError::ZeroDenominator));
    }

    #[test]
    fn laurent_examples() {
        // (n - λ) / (4 (λ - λk)) with n = 2, λk = 3/2: residue (n - λk)/4 = 1/8
        let lk = rat(3, 2);
        let f = normalize_ratfunc(p(&[int(2), int(-1)]), Poly::linear_root(&lk).scale(&int(4))).unwrap();
        assert_eq!(laurent_coeff(&f, &lk, 1), rat(1, 8));
        let g = normalize_ratfunc(Poly::one(), Poly::linear_root(&int(2)).pow(2)).unwrap();
        assert_eq!(laurent_coeff(&g, &int(2), 2), int(1));
        assert_eq!(laurent_coeff(&g, &int(2), 1), int(0));
        let h = RatFunc::from_poly(p(&[int(1), int(1)]));
        assert_eq!(laurent_coeff(&h, &int(0), 1), int(0));
    }
}
