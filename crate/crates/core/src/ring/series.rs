use super::{Coeff, RingError};

/// Truncated power series `Σ c_i x^i`, known modulo `O(x^(order+1))`.
#[derive(Clone, Debug, PartialEq)]
pub struct XSeries<C> {
    coeffs: Vec<C>,
    order: usize,
}

impl<C: Coeff> XSeries<C> {
    /// Pads with zeros or drops terms above `order`.
    pub fn new(mut coeffs: Vec<C>, order: usize) -> Self {
        coeffs.resize(order + 1, C::zero());
        XSeries { coeffs, order }
    }

    pub fn zero(order: usize) -> Self {
        XSeries::new(Vec::new(), order)
    }

    pub fn one(order: usize) -> Self {
        XSeries::new(vec![C::one()], order)
    }

    /// `c x^j` (zero if `j > order`).
    pub fn monomial(c: C, j: usize, order: usize) -> Self {
        let mut s = XSeries::zero(order);
        if j <= order {
            s.coeffs[j] = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    /// Coefficient of `x^i`; panics above the truncation order.
    pub fn coeff(&self, i: usize) -> &C {
        assert!(i <= self.order, "coefficient {i} beyond truncation order {}", self.order);
        &self.coeffs[i]
    }

    pub fn set_coeff(&mut self, i: usize, c: C) {
        assert!(i <= self.order, "coefficient {i} beyond truncation order {}", self.order);
        self.coeffs[i] = c;
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        XSeries::new(self.coeffs[..=order].to_vec(), order)
    }

    pub fn add(&self, other: &Self) -> Self {
        let m = self.order.min(other.order);
        XSeries::new((0..=m).map(|i| self.coeffs[i].plus(&other.coeffs[i])).collect(), m)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let m = self.order.min(other.order);
        XSeries::new((0..=m).map(|i| self.coeffs[i].minus(&other.coeffs[i])).collect(), m)
    }

    pub fn neg(&self) -> Self {
        XSeries::new(self.coeffs.iter().map(C::negated).collect(), self.order)
    }

    /// Cauchy product, truncated at the smaller order.
    pub fn mul(&self, other: &Self) -> Self {
        let m = self.order.min(other.order);
        let mut out = vec![C::zero(); m + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(m + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(m + 1 - i) {
                if !b.is_zero() {
                    out[i + j] = out[i + j].plus(&a.times(b));
                }
            }
        }
        XSeries::new(out, m)
    }

    pub fn scale(&self, s: &C) -> Self {
        XSeries::new(self.coeffs.iter().map(|c| c.times(s)).collect(), self.order)
    }

    /// `d/dx`; the result is known one order less. Requires `order >= 1`.
    pub fn derivative(&self) -> Self {
        assert!(self.order >= 1, "derivative of an order-0 series carries no information");
        let out = (1..=self.order)
            .map(|i| {
                let k = C::from_rational(&super::int(i as i64));
                self.coeffs[i].times(&k)
            })
            .collect();
        XSeries::new(out, self.order - 1)
    }

    /// Multiplication by `x^k`; the truncation order rises by `k`.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut out = vec![C::zero(); k];
        out.extend(self.coeffs.iter().cloned());
        XSeries::new(out, self.order + k)
    }

    /// `s^{-1}` modulo `O(x^(order+1))`.
    pub fn reciprocal(&self) -> Result<Self, RingError> {
        let inv0 = self.coeffs[0].inverse().ok_or(RingError::NonInvertibleLeadingTerm)?;
        let mut out: Vec<C> = Vec::with_capacity(self.order + 1);
        out.push(inv0.clone());
        for i in 1..=self.order {
            let mut acc = C::zero();
            for j in 1..=i {
                if !self.coeffs[j].is_zero() {
                    acc = acc.plus(&self.coeffs[j].times(&out[i - j]));
                }
            }
            out.push(acc.times(&inv0).negated());
        }
        Ok(XSeries::new(out, self.order))
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> XSeries<D> {
        XSeries::new(self.coeffs.iter().map(f).collect(), self.order)
    }

    /// True when every coefficient through the truncation order is zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(C::is_zero)
    }
}

/// Reciprocal of a series; free-function form of [`XSeries::reciprocal`].
pub fn series_reciprocal<C: Coeff>(s: &XSeries<C>) -> Result<XSeries<C>, RingError> {
    s.reciprocal()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{int, rat, Rational};

    fn q(cs: &[Rational], order: usize) -> XSeries<Rational> {
        XSeries::new(cs.to_vec(), order)
    }

    #[test]
    fn geometric_series() {
        let s = q(&[int(1), int(1)], 6);
        let r = s.reciprocal().unwrap();
        for i in 0..=6 {
            assert_eq!(r.coeff(i), &int(if i % 2 == 0 { 1 } else { -1 }));
        }
    }

    #[test]
    fn hyperbolic_warp_reciprocal() {
        // (1 - x^2/4)^2 = 1 - x^2/2 + x^4/16; (1-u)^-2 = 1 + 2u + 3u^2 + 4u^3 with u = x^2/4
        let s = q(&[int(1), int(0), rat(-1, 2), int(0), rat(1, 16)], 6);
        let r = s.reciprocal().unwrap();
        let expect = [int(1), int(0), rat(1, 2), int(0), rat(3, 16), int(0), rat(1, 16)];
        assert_eq!(r.coeffs(), &expect);
    }

    #[test]
    fn non_invertible_leading_term() {
        let s = q(&[int(0), int(1), int(1)], 4);
        assert_eq!(series_reciprocal(&s), Err(RingError::NonInvertibleLeadingTerm));
    }

    #[test]
    fn orders_track_the_minimum() {
        let a = q(&[int(1), int(2)], 5);
        let b = q(&[int(3)], 3);
        assert_eq!(a.mul(&b).order(), 3);
        assert_eq!(a.add(&b).order(), 3);
        assert_eq!(a.derivative().order(), 4);
        assert_eq!(a.derivative().coeff(0), &int(2));
        assert_eq!(a.shift_up(2).order(), 7);
    }
}
