use num_complex::Complex;

use super::Real;

/// Elementary functions on `Complex<T>` for any [`Real`] `T`.
///
/// `num_complex` only provides these for `Float` types.
pub trait ComplexExt<T: Real>: Sized {
    fn from_f64c(z: Complex<f64>) -> Self;
    fn to_f64c(self) -> Complex<f64>;
    fn abs_r(self) -> T;
    fn exp_r(self) -> Self;
    /// Principal logarithm.
    fn ln_r(self) -> Self;
    /// `x^self` for real `x > 0`.
    fn real_base_pow(self, x: T) -> Self;
    fn scale(self, s: T) -> Self;
}

impl<T: Real> ComplexExt<T> for Complex<T> {
    fn from_f64c(z: Complex<f64>) -> Self {
        Complex::new(T::from_f64(z.re), T::from_f64(z.im))
    }

    fn to_f64c(self) -> Complex<f64> {
        Complex::new(self.re.to_f64(), self.im.to_f64())
    }

    fn abs_r(self) -> T {
        let a = self.re.abs();
        let b = self.im.abs();
        let (big, small) = if a > b { (a, b) } else { (b, a) };
        if big.is_zero() {
            return T::zero();
        }
        let r = small / big;
        big * (T::one() + r * r).sqrt()
    }

    fn exp_r(self) -> Self {
        let m = self.re.exp();
        let (s, c) = self.im.sin_cos();
        Complex::new(m * c, m * s)
    }

    fn ln_r(self) -> Self {
        let r = self.abs_r();
        // atan2 through the double value refined by one Newton step on
        // sin/cos, which is enough for every supported width.
        let mut theta = T::from_f64(self.im.to_f64().atan2(self.re.to_f64()));
        for _ in 0..2 {
            let (s, c) = theta.sin_cos();
            // f(theta) = re*sin(theta) - im*cos(theta); f' = re*cos + im*sin
            let f = self.re * s - self.im * c;
            let fp = self.re * c + self.im * s;
            if fp.is_zero() {
                break;
            }
            theta -= f / fp;
        }
        Complex::new(r.ln(), theta)
    }

    fn real_base_pow(self, x: T) -> Self {
        (self * x.ln()).exp_r()
    }

    fn scale(self, s: T) -> Self {
        Complex::new(self.re * s, self.im * s)
    }
}
