use std::cmp::Ordering;
use std::ops::Neg;

use qd::Quad;

use super::Real;

/// Double-double arithmetic (about 106 significant bits).
///
/// Thin wrapper over [`qd::Quad`] that routes addition through the accurate
/// two-sum path; the crate's default `+` is the cheaper estimate, which loses
/// digits under the heavy cancellation in Wronskian evaluations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DoubleDouble(pub Quad);

impl DoubleDouble {
    pub fn hi(self) -> f64 {
        self.0 .0
    }

    pub fn lo(self) -> f64 {
        self.0 .1
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let d = self.0.sub_accurate(other.0);
        d.0.partial_cmp(&0.0)
    }
}

macro_rules! forward_binops {
    ($ty:ident, $add:expr, $sub:expr, $mul:expr, $div:expr) => {
        impl std::ops::Add for $ty {
            type Output = $ty;
            #[inline]
            fn add(self, rhs: $ty) -> $ty {
                $add(self, rhs)
            }
        }
        impl std::ops::Sub for $ty {
            type Output = $ty;
            #[inline]
            fn sub(self, rhs: $ty) -> $ty {
                $sub(self, rhs)
            }
        }
        impl std::ops::Mul for $ty {
            type Output = $ty;
            #[inline]
            fn mul(self, rhs: $ty) -> $ty {
                $mul(self, rhs)
            }
        }
        impl std::ops::Div for $ty {
            type Output = $ty;
            #[inline]
            fn div(self, rhs: $ty) -> $ty {
                $div(self, rhs)
            }
        }
        impl std::ops::Rem for $ty {
            type Output = $ty;
            fn rem(self, rhs: $ty) -> $ty {
                let q = (self / rhs).to_f64().trunc();
                self - rhs * <$ty as Real>::from_f64(q)
            }
        }
        impl std::ops::AddAssign for $ty {
            #[inline]
            fn add_assign(&mut self, rhs: $ty) {
                *self = *self + rhs;
            }
        }
        impl std::ops::SubAssign for $ty {
            #[inline]
            fn sub_assign(&mut self, rhs: $ty) {
                *self = *self - rhs;
            }
        }
        impl std::ops::MulAssign for $ty {
            #[inline]
            fn mul_assign(&mut self, rhs: $ty) {
                *self = *self * rhs;
            }
        }
        impl std::ops::DivAssign for $ty {
            #[inline]
            fn div_assign(&mut self, rhs: $ty) {
                *self = *self / rhs;
            }
        }
        impl num_traits::Zero for $ty {
            fn zero() -> $ty {
                <$ty as Real>::from_f64(0.0)
            }
            fn is_zero(&self) -> bool {
                self.to_f64() == 0.0
            }
        }
        impl num_traits::One for $ty {
            fn one() -> $ty {
                <$ty as Real>::from_f64(1.0)
            }
        }
        impl num_traits::Num for $ty {
            type FromStrRadixErr = num_traits::ParseFloatError;
            fn from_str_radix(s: &str, radix: u32) -> Result<$ty, Self::FromStrRadixErr> {
                f64::from_str_radix(s, radix).map(<$ty as Real>::from_f64)
            }
        }
    };
}
pub(crate) use forward_binops;

forward_binops!(
    DoubleDouble,
    |a: DoubleDouble, b: DoubleDouble| DoubleDouble(a.0.add_accurate(b.0)),
    |a: DoubleDouble, b: DoubleDouble| DoubleDouble(a.0.sub_accurate(b.0)),
    |a: DoubleDouble, b: DoubleDouble| DoubleDouble(a.0 * b.0),
    |a: DoubleDouble, b: DoubleDouble| DoubleDouble(a.0 / b.0)
);

impl Neg for DoubleDouble {
    type Output = DoubleDouble;
    fn neg(self) -> DoubleDouble {
        DoubleDouble(-self.0)
    }
}

impl Real for DoubleDouble {
    const EPSILON: f64 = 4.93038065763132e-32;
    const PRECISION: super::Precision = super::Precision::Dd;

    fn from_f64(x: f64) -> Self {
        DoubleDouble(Quad::from_f64(x))
    }
    fn to_f64(self) -> f64 {
        self.0 .0 + self.0 .1
    }
    fn abs(self) -> Self {
        DoubleDouble(self.0.abs())
    }
    fn sqrt(self) -> Self {
        if self.0 .0 <= 0.0 {
            return DoubleDouble::from_f64(self.0 .0.sqrt());
        }
        // One Newton step from the double root.
        let x = DoubleDouble::from_f64(self.0 .0.sqrt());
        x + (self - x * x) / x.mul_pow2(1)
    }
    fn mul_pow2(self, e: i32) -> Self {
        let s = 2f64.powi(e);
        DoubleDouble(Quad(self.0 .0 * s, self.0 .1 * s))
    }
    fn pi() -> Self {
        DoubleDouble(Quad::PI)
    }
    fn ln2() -> Self {
        DoubleDouble(Quad::LN_2)
    }
}
