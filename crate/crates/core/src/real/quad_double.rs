use std::cmp::Ordering;
use std::ops::Neg;
use std::sync::OnceLock;

use super::double_double::forward_binops;
use super::{arctan_inverse, ln2_series, Real};

/// Quad-double arithmetic (about 212 significant bits).
///
/// Components are stored largest first and are nonoverlapping. Sums and
/// products are formed as exact floating point expansions and then rounded
/// back to four words, which is slower than the classic branchy renormalisation
/// but easy to get right.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadDouble(pub [f64; 4]);

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn fast_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Adds `b` into the nonoverlapping expansion `e` (increasing magnitude),
/// exactly. Zero components are dropped.
fn grow_expansion(e: &mut Vec<f64>, b: f64) {
    let mut q = b;
    let mut out = Vec::with_capacity(e.len() + 1);
    for &ei in e.iter() {
        let (s, h) = two_sum(q, ei);
        if h != 0.0 {
            out.push(h);
        }
        q = s;
    }
    if q != 0.0 || out.is_empty() {
        out.push(q);
    }
    *e = out;
}

/// Rounds an exact expansion (increasing magnitude) to four words.
fn compress_to_quad(e: &[f64]) -> QuadDouble {
    if e.is_empty() {
        return QuadDouble([0.0; 4]);
    }
    let n = e.len();
    let mut h = vec![0.0; n];
    let mut bottom = n - 1;
    let mut q = e[n - 1];
    for idx in (0..n - 1).rev() {
        let (qnew, small) = fast_two_sum(q, e[idx]);
        if small != 0.0 {
            h[bottom] = qnew;
            bottom -= 1;
            q = small;
        } else {
            q = qnew;
        }
    }
    let mut top = 0;
    for idx in bottom + 1..n {
        let (qnew, small) = fast_two_sum(h[idx], q);
        if small != 0.0 {
            h[top] = small;
            top += 1;
        }
        q = qnew;
    }
    h[top] = q;
    // h[0..=top] increasing magnitude; keep the four largest and fold the
    // remainder into the last word.
    let mut out = [0.0; 4];
    let mut k = 0;
    let mut i = top as isize;
    while i >= 0 && k < 4 {
        out[k] = h[i as usize];
        k += 1;
        i -= 1;
    }
    while i >= 0 {
        out[3] += h[i as usize];
        i -= 1;
    }
    QuadDouble(out)
}

fn sum_terms(terms: &[f64]) -> QuadDouble {
    let mut e: Vec<f64> = Vec::with_capacity(terms.len());
    for &t in terms {
        if t != 0.0 {
            grow_expansion(&mut e, t);
        }
    }
    e.retain(|&x| x != 0.0);
    compress_to_quad(&e)
}

impl QuadDouble {
    fn add_qd(self, other: QuadDouble) -> QuadDouble {
        let mut terms = [0.0; 8];
        terms[..4].copy_from_slice(&self.0);
        terms[4..].copy_from_slice(&other.0);
        // Smallest first keeps the expansion short while it grows.
        terms.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap_or(Ordering::Equal));
        sum_terms(&terms)
    }

    fn mul_qd(self, other: QuadDouble) -> QuadDouble {
        let a = self.0;
        let b = other.0;
        if !a[0].is_finite() || !b[0].is_finite() {
            return QuadDouble([a[0] * b[0], 0.0, 0.0, 0.0]);
        }
        let mut terms = Vec::with_capacity(24);
        for i in 0..4 {
            for j in 0..4 {
                match i + j {
                    0..=3 => {
                        let (p, e) = two_prod(a[i], b[j]);
                        terms.push(p);
                        terms.push(e);
                    }
                    4 => terms.push(a[i] * b[j]),
                    _ => {}
                }
            }
        }
        terms.sort_by(|x, y| x.abs().partial_cmp(&y.abs()).unwrap_or(Ordering::Equal));
        sum_terms(&terms)
    }

    fn div_qd(self, other: QuadDouble) -> QuadDouble {
        let b0 = other.0[0];
        if b0 == 0.0 {
            return QuadDouble([self.0[0] / b0, 0.0, 0.0, 0.0]);
        }
        let mut r = self;
        let mut q = [0.0; 5];
        for qi in q.iter_mut() {
            *qi = r.0[0] / b0;
            r = r.add_qd(-(other.mul_qd(QuadDouble([*qi, 0.0, 0.0, 0.0]))));
        }
        let mut terms = q;
        terms.sort_by(|x, y| x.abs().partial_cmp(&y.abs()).unwrap_or(Ordering::Equal));
        sum_terms(&terms)
    }
}

forward_binops!(
    QuadDouble,
    |a: QuadDouble, b: QuadDouble| a.add_qd(b),
    |a: QuadDouble, b: QuadDouble| a.add_qd(-b),
    |a: QuadDouble, b: QuadDouble| a.mul_qd(b),
    |a: QuadDouble, b: QuadDouble| a.div_qd(b)
);

impl Neg for QuadDouble {
    type Output = QuadDouble;
    fn neg(self) -> QuadDouble {
        QuadDouble(self.0.map(|x| -x))
    }
}

impl PartialOrd for QuadDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let d = *self - *other;
        d.0[0].partial_cmp(&0.0)
    }
}

static PI: OnceLock<QuadDouble> = OnceLock::new();
static LN2: OnceLock<QuadDouble> = OnceLock::new();

impl Real for QuadDouble {
    const EPSILON: f64 = 1.215_432_671_457_254e-63;
    const PRECISION: super::Precision = super::Precision::Qd;

    fn from_f64(x: f64) -> Self {
        QuadDouble([x, 0.0, 0.0, 0.0])
    }
    fn to_f64(self) -> f64 {
        self.0[0] + (self.0[1] + (self.0[2] + self.0[3]))
    }
    fn abs(self) -> Self {
        if self.0[0] < 0.0 {
            -self
        } else {
            self
        }
    }
    fn sqrt(self) -> Self {
        let a0 = self.0[0];
        if a0 <= 0.0 {
            return QuadDouble::from_f64(a0.sqrt());
        }
        let mut x = QuadDouble::from_f64(a0.sqrt());
        for _ in 0..3 {
            x = x + (self - x * x) / x.mul_pow2(1);
        }
        x
    }
    fn mul_pow2(self, e: i32) -> Self {
        let s = 2f64.powi(e);
        QuadDouble(self.0.map(|x| x * s))
    }
    fn pi() -> Self {
        *PI.get_or_init(|| {
            // Machin: pi = 16 atan(1/5) - 4 atan(1/239)
            arctan_inverse::<QuadDouble>(5).mul_pow2(4) - arctan_inverse::<QuadDouble>(239).mul_pow2(2)
        })
    }
    fn ln2() -> Self {
        *LN2.get_or_init(ln2_series::<QuadDouble>)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference words generated with 80-digit arithmetic.
    const PI_WORDS: [f64; 4] = [
        3.141592653589793,
        1.2246467991473532e-16,
        -2.9947698097183397e-33,
        1.1124542208633653e-49,
    ];
    const E_WORDS: [f64; 4] = [
        2.718281828459045,
        1.4456468917292502e-16,
        -2.1277171080381768e-33,
        1.5156301598412191e-49,
    ];

    fn close(a: QuadDouble, words: [f64; 4], tol: f64) -> bool {
        (a - QuadDouble(words)).abs().to_f64() <= tol
    }

    #[test]
    fn constants_match_reference_words() {
        assert!(close(QuadDouble::pi(), PI_WORDS, 1e-62));
        assert!(close(QuadDouble::from_f64(1.0).exp(), E_WORDS, 1e-61));
    }

    #[test]
    fn expansion_arithmetic_is_exact_on_representable_inputs() {
        let a = QuadDouble([1.0, 2f64.powi(-60), 0.0, 0.0]);
        let b = QuadDouble([-1.0, 2f64.powi(-70), 0.0, 0.0]);
        let s = a + b;
        assert_eq!(s.0[0], 2f64.powi(-60) + 2f64.powi(-70));
        let third = QuadDouble::from_f64(1.0) / QuadDouble::from_f64(3.0);
        let back = third * QuadDouble::from_f64(3.0) - QuadDouble::from_f64(1.0);
        assert!(back.abs().to_f64() < 1e-63);
    }

    #[test]
    fn ordering_sees_trailing_words() {
        let a = QuadDouble([1.0, 0.0, 0.0, 1e-60]);
        let b = QuadDouble([1.0, 0.0, 0.0, -1e-60]);
        assert!(a > b);
    }
}
