use num_complex::Complex;

use super::{ModeParams, RadialError, RadialProfile};
use crate::real::{ComplexExt, Real};

/// Which boundary exponent a Frobenius solution starts with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `x^λ (1 + …)`.
    Lambda,
    /// `x^(n-λ) (1 + …)`.
    NMinusLambda,
}

/// `x^σ Σ a_m x^m` at the boundary.
#[derive(Clone, Debug)]
pub struct FrobeniusSeries<T: Real> {
    pub sigma: Complex<T>,
    pub coeffs: Vec<Complex<T>>,
    /// Set when the series was multiplied through by `n - 2λ - m0` so that it
    /// stays analytic across the lattice point `2λ = n - m0`.
    pub regularized_at: Option<usize>,
}

/// Value, derivative and the cancellation ratio `Σ|terms| / |Σ terms|`.
#[derive(Clone, Copy, Debug)]
pub struct SeriesValue<T: Real> {
    pub u: Complex<T>,
    pub du: Complex<T>,
    pub cancellation: f64,
}

impl<T: Real> FrobeniusSeries<T> {
    pub fn eval(&self, x: T) -> SeriesValue<T> {
        let mut s0 = Complex::new(T::zero(), T::zero());
        let mut s1 = s0;
        let mut mag = T::zero();
        let mut xm = T::one();
        for (m, a) in self.coeffs.iter().enumerate() {
            let term = a.scale(xm);
            s0 = s0 + term;
            s1 = s1 + term * (self.sigma + Complex::new(T::from_i64(m as i64), T::zero()));
            mag += term.abs_r();
            xm *= x;
        }
        let xs = self.sigma.real_base_pow(x);
        let u = xs * s0;
        let du = xs * s1.scale(T::one() / x);
        let denom = s0.abs_r().to_f64();
        let cancellation = if denom > 0.0 { (mag.to_f64() / denom).max(1.0) } else { f64::INFINITY };
        SeriesValue { u, du, cancellation }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }
}

fn c<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

pub(crate) fn to_c<T: Real>(z: num_complex::Complex64) -> Complex<T> {
    Complex::from_f64c(z)
}

/// Smallest `|m(n - 2σ - m)|` for `m = 1..=order`, skipping `skip`.
pub fn lattice_distance(n: u32, sigma: num_complex::Complex64, order: usize, skip: Option<usize>) -> (usize, f64) {
    let mut worst = (0, f64::INFINITY);
    for m in 1..=order.max(1) {
        if Some(m) == skip {
            continue;
        }
        let mf = m as f64;
        let v = (mf * (n as f64 - 2.0 * sigma - mf)).norm();
        if v < worst.1 {
            worst = (m, v);
        }
    }
    worst
}

struct Recurrence<T: Real> {
    n: T,
    d: Vec<T>,
    v: Complex<T>,
    s: Complex<T>,
    sigma: Complex<T>,
}

impl<T: Real> Recurrence<T> {
    /// `Σ_{i≥1} d_i (e(n-e) - s - (n/2) i e) a_{N-i} + v a_{N-2}` with `e = σ+N-i`.
    fn numerator(&self, big_n: usize, a: &[Complex<T>]) -> Complex<T> {
        let half_n = self.n.mul_pow2(-1);
        let mut acc = Complex::new(T::zero(), T::zero());
        for (i, &di) in self.d.iter().enumerate().skip(1) {
            if i > big_n || di.is_zero() {
                continue;
            }
            let e = self.sigma + c(T::from_i64((big_n - i) as i64));
            let bracket = e * (c(self.n) - e) - self.s - e.scale(half_n * T::from_i64(i as i64));
            acc = acc + bracket * a[big_n - i].scale(di);
        }
        if big_n >= 2 {
            acc = acc + self.v * a[big_n - 2];
        }
        acc
    }

    /// `N(n - 2σ - N)`.
    fn indicial(&self, big_n: usize) -> Complex<T> {
        let nn = T::from_i64(big_n as i64);
        (c(self.n) - self.sigma.scale(T::from_f64(2.0)) - c(nn)).scale(nn)
    }
}

pub(crate) struct BoundarySetup {
    pub guard: f64,
    pub regularize: Option<usize>,
}

fn build<T: Real>(
    p: &RadialProfile,
    params: &ModeParams,
    branch: Branch,
    setup: &BoundarySetup,
    mut stop: impl FnMut(usize, &[Complex<T>]) -> bool,
) -> Result<FrobeniusSeries<T>, RadialError> {
    let n = params.n;
    let lam = params.lambda;
    let sigma64 = match branch {
        Branch::Lambda => lam,
        Branch::NMinusLambda => n as f64 - lam,
    };
    let regularize = match branch {
        Branch::Lambda => setup.regularize,
        Branch::NMinusLambda => None,
    };
    let rec = Recurrence::<T> {
        n: T::from_i64(n as i64),
        d: p.boundary_coeffs().into_iter().map(T::from_f64).collect(),
        v: c(T::from_f64(params.v())),
        s: to_c::<T>(params.s()),
        sigma: to_c::<T>(sigma64),
    };
    let eps = regularize.map(|m0| c(rec.n) - rec.sigma.scale(T::from_f64(2.0)) - c(T::from_i64(m0 as i64)));
    let mut a: Vec<Complex<T>> = vec![c(T::one())];
    let mut big_n = 0;
    loop {
        if stop(big_n, &a) {
            break;
        }
        big_n += 1;
        let num = rec.numerator(big_n, &a);
        let next = if Some(big_n) == regularize {
            // Coefficients below m0 pick up the factor ε; the pole at m0 cancels.
            let e = eps.expect("regularisation factor");
            for ai in a.iter_mut() {
                *ai = *ai * e;
            }
            -num.scale(T::one() / T::from_i64(big_n as i64))
        } else {
            let den = rec.indicial(big_n);
            let dist = den.to_f64c().norm();
            if dist <= setup.guard {
                return Err(RadialError::IndicialCollision { m: big_n, distance: dist });
            }
            -num / den
        };
        a.push(next);
    }
    Ok(FrobeniusSeries {
        sigma: rec.sigma,
        coeffs: a,
        regularized_at: regularize,
    })
}

/// Size of the recursion numerator at `m0` for the `x^λ` branch at the exact
/// lattice point `λ = (n - m0)/2`, relative to its largest contribution.
///
/// Zero means the lattice point is removable for `A`; otherwise `A` has a
/// simple pole there and must be regularised before counting zeros.
pub fn lattice_residue(p: &RadialProfile, n: u32, l: u32, m0: usize) -> f64 {
    let lam = (n as f64 - m0 as f64) / 2.0;
    let params = ModeParams::new(n, l, num_complex::Complex64::new(lam, 0.0));
    let rec = Recurrence::<f64> {
        n: n as f64,
        d: p.boundary_coeffs(),
        v: c(params.v()),
        s: c(lam * (n as f64 - lam)),
        sigma: c(lam),
    };
    let mut a = vec![c(1.0)];
    let mut scale = 1.0f64;
    for big_n in 1..m0 {
        let next = -rec.numerator(big_n, &a) / rec.indicial(big_n);
        scale = scale.max(next.norm());
        a.push(next);
    }
    let num = rec.numerator(m0, &a).norm();
    let size = scale * (1.0 + params.v() + (m0 * m0) as f64 + lam.abs() * n as f64);
    num / size
}

/// Boundary Frobenius solution to fixed order `M` with `a₀ = 1`.
///
/// Fails with `IndicialCollision` when some `|m(n - 2σ - m)|` is within
/// `guard` of zero.
pub fn frobenius_boundary<T: Real>(
    p: &RadialProfile,
    params: &ModeParams,
    branch: Branch,
    order: usize,
    guard: f64,
) -> Result<FrobeniusSeries<T>, RadialError> {
    let setup = BoundarySetup { guard, regularize: None };
    build(p, params, branch, &setup, |m, _| m >= order)
}

/// Series grown until the terms at `x` drop below working precision.
pub(crate) fn frobenius_boundary_at<T: Real>(
    p: &RadialProfile,
    params: &ModeParams,
    branch: Branch,
    x: f64,
    max_order: usize,
    setup: &BoundarySetup,
) -> Result<FrobeniusSeries<T>, RadialError> {
    let eps = T::EPSILON;
    let mut small_run = 0;
    let mut total = 0.0f64;
    let deg = p.boundary_coeffs().len();
    build(p, params, branch, setup, |m, a| {
        let term = a[m].to_f64c().norm() * x.powi(m as i32);
        total = total.max(term);
        if term <= eps * total {
            small_run += 1;
        } else {
            small_run = 0;
        }
        m >= max_order || (m > deg && small_run > deg)
    })
}

/// ODE residual of a boundary series at `x`, relative to the largest term.
pub fn boundary_residual<T: Real>(p: &RadialProfile, params: &ModeParams, series: &FrobeniusSeries<T>, x: T) -> f64 {
    // u'' from the series directly.
    let mut s0 = Complex::new(T::zero(), T::zero());
    let mut s1 = s0;
    let mut s2 = s0;
    let mut xm = T::one();
    for (m, a) in series.coeffs.iter().enumerate() {
        let e = series.sigma + c(T::from_i64(m as i64));
        let term = a.scale(xm);
        s0 = s0 + term;
        s1 = s1 + term * e;
        s2 = s2 + term * e * (e - c(T::one()));
        xm *= x;
    }
    let (d, dp) = p.eval_unchecked(x);
    let n = T::from_i64(params.n as i64);
    let v = c(T::from_f64(params.v()));
    let s = to_c::<T>(params.s());
    // Multiply the ODE by x^{-σ}: -s2 + (n-1)s1 - (n/2)(d'/d) x s1 + (x²/d) v s0 - s s0.
    let terms = [
        -s2,
        s1.scale(n - T::one()),
        -s1.scale(n.mul_pow2(-1) * dp / d * x),
        v * s0.scale(x * x / d),
        -(s * s0),
    ];
    let sum = terms.iter().fold(Complex::new(T::zero(), T::zero()), |acc, t| acc + *t);
    let scale = terms.iter().map(|t| t.abs_r().to_f64()).fold(0.0, f64::max);
    sum.abs_r().to_f64() / scale.max(f64::MIN_POSITIVE)
}

/// Center-regular solution in `t = 2 - x`: `t^l Σ a_m t^m`.
#[derive(Clone, Debug)]
pub struct CenterSeries<T: Real> {
    pub l: u32,
    pub coeffs: Vec<Complex<T>>,
    /// Both indicial exponents at `t = 0`, larger real part first.
    pub indicial_roots: [f64; 2],
}

impl<T: Real> CenterSeries<T> {
    /// `(t^-l u, t^-l du/dx)` at `t`.
    pub fn eval_scaled(&self, t: T) -> (Complex<T>, Complex<T>) {
        let mut u = Complex::new(T::zero(), T::zero());
        let mut ut = u;
        let mut tm = T::one();
        let l = T::from_i64(self.l as i64);
        for (m, a) in self.coeffs.iter().enumerate() {
            u = u + a.scale(tm);
            // d/dt (t^{l+m}) t^{-l} = (l+m) t^{m-1}
            ut = ut + a.scale((l + T::from_i64(m as i64)) * tm / t);
            tm *= t;
        }
        (u, -ut)
    }
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Euler-form coefficients `p2 t² u_tt + p1 t u_t + p0 u = 0` of the mode
/// equation on the hyperbolic branch, in powers of `t`. The `p0` part is
/// returned as `(16 (2-t)², t² (4-t)²)` to be combined with `v` and `s`.
fn center_polys(n: u32) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let two_m_t = [2.0, -1.0];
    let four_m_t = [4.0, -1.0];
    let t = [0.0, 1.0];
    let t2m = poly_mul(&two_m_t, &two_m_t);
    let f42 = poly_mul(&four_m_t, &four_m_t);
    let p2: Vec<f64> = poly_mul(&t2m, &f42).into_iter().map(|x| -x).collect();
    let nf = n as f64;
    let a = poly_mul(&poly_mul(&two_m_t, &t), &f42);
    let b = poly_mul(&poly_mul(&t2m, &two_m_t), &four_m_t);
    let len = a.len().max(b.len());
    let p1 = (0..len)
        .map(|i| -(nf - 1.0) * a.get(i).copied().unwrap_or(0.0) - 2.0 * nf * b.get(i).copied().unwrap_or(0.0))
        .collect();
    let v_part = t2m.iter().map(|x| 16.0 * x).collect();
    let s_part = poly_mul(&poly_mul(&t, &t), &f42);
    (p2, p1, v_part, s_part)
}

/// Regular solution at the ball center to fixed order, `a₀ = 1`.
pub fn frobenius_center<T: Real>(p: &RadialProfile, params: &ModeParams, order: usize) -> CenterSeries<T> {
    let _ = p; // the hyperbolic branch of d holds near the center for every profile
    let (p2, p1, vp, sp) = center_polys(params.n);
    let v = c(T::from_f64(params.v()));
    let s = to_c::<T>(params.s());
    let get = |arr: &[f64], j: usize| arr.get(j).copied().unwrap_or(0.0);
    let p0 = |j: usize| v.scale(T::from_f64(get(&vp, j))) - s.scale(T::from_f64(get(&sp, j)));

    // Indicial polynomial p2₀ e(e-1) + p1₀ e + p0₀ with p0₀ = 64 v.
    let qa = p2[0];
    let qb = p1[0] - p2[0];
    let qc = 64.0 * params.v();
    let disc = (qb * qb - 4.0 * qa * qc).sqrt();
    let r1 = (-qb + disc) / (2.0 * qa);
    let r2 = (-qb - disc) / (2.0 * qa);
    let roots = if r1 >= r2 { [r1, r2] } else { [r2, r1] };
    let l = params.l;

    let sigma = T::from_i64(l as i64);
    let mut a: Vec<Complex<T>> = vec![c(T::one())];
    for big_n in 1..=order {
        let mut num = Complex::new(T::zero(), T::zero());
        for j in 1..=big_n {
            let e = sigma + T::from_i64((big_n - j) as i64);
            let coef = c(T::from_f64(get(&p2, j)) * e * (e - T::one()) + T::from_f64(get(&p1, j)) * e) + p0(j);
            num = num + coef * a[big_n - j];
        }
        let e = sigma + T::from_i64(big_n as i64);
        let den = c(T::from_f64(p2[0]) * e * (e - T::one()) + T::from_f64(p1[0]) * e) + p0(0);
        a.push(-num / den);
    }
    CenterSeries {
        l,
        coeffs: a,
        indicial_roots: roots,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn params(n: u32, l: u32, lam: Complex64) -> ModeParams {
        ModeParams::new(n, l, lam)
    }

    #[test]
    fn first_coefficient_matches_hand_recursion() {
        let p = RadialProfile::new(2, 0, 1.0).unwrap();
        let lam = Complex64::new(0.3, 0.7);
        let s = frobenius_boundary::<f64>(&p, &params(2, 3, lam), Branch::Lambda, 10, 1e-3).unwrap();
        assert_eq!(s.coeffs[0], Complex64::new(1.0, 0.0));
        let expect = lam / (1.0 - 2.0 * lam);
        assert!((s.coeffs[1] - expect).norm() < 1e-15);
    }

    #[test]
    fn indicial_roots_are_lambda_and_reflection() {
        // Substituting x^σ leaves σ(n-σ) - λ(n-λ) in the leading coefficient.
        let lam = Complex64::new(0.8, -1.1);
        for sigma in [lam, 3.0 - lam] {
            let r = sigma * (3.0 - sigma) - lam * (3.0 - lam);
            assert!(r.norm() < 1e-14);
        }
    }

    #[test]
    fn boundary_series_solves_the_ode() {
        let p = RadialProfile::new(3, 1, 1.0).unwrap();
        for lam in [Complex64::new(0.2, 0.4), Complex64::new(2.3, -1.0)] {
            let pr = params(3, 4, lam);
            for br in [Branch::Lambda, Branch::NMinusLambda] {
                let s = frobenius_boundary::<f64>(&p, &pr, br, 60, 1e-3).unwrap();
                assert!(boundary_residual(&p, &pr, &s, 0.25) < 1e-10);
            }
        }
    }

    #[test]
    fn lattice_collision_is_reported() {
        let p = RadialProfile::new(2, 0, 1.0).unwrap();
        let pr = params(2, 1, Complex64::new(0.5 + 1e-5, 0.0));
        let e = frobenius_boundary::<f64>(&p, &pr, Branch::Lambda, 10, 1e-3).unwrap_err();
        assert!(matches!(e, RadialError::IndicialCollision { m: 1, .. }));
    }

    #[test]
    fn regularised_series_solves_the_ode_on_and_off_the_lattice() {
        let p = RadialProfile::new(2, 0, 1.0).unwrap();
        let setup = BoundarySetup {
            guard: 1e-3,
            regularize: Some(1),
        };
        for lam in [Complex64::new(0.5, 0.0), Complex64::new(0.45, 0.0), Complex64::new(0.5, 0.02)] {
            let pr = params(2, 6, lam);
            let s = frobenius_boundary_at::<f64>(&p, &pr, Branch::Lambda, 0.2, 400, &setup).unwrap();
            assert!(boundary_residual(&p, &pr, &s, 0.2) < 1e-12, "{lam}");
            let eps = 1.0 - 2.0 * lam;
            assert!((s.coeffs[0] - eps).norm() < 1e-15);
        }
    }

    #[test]
    fn lattice_residue_separates_even_and_odd_profiles() {
        let hyp = RadialProfile::hyperbolic(2);
        assert_eq!(lattice_residue(&hyp, 2, 7, 1), 0.0);
        assert_eq!(lattice_residue(&hyp, 2, 7, 3), 0.0);
        let odd = RadialProfile::new(2, 0, 1.0).unwrap();
        assert!(lattice_residue(&odd, 2, 7, 1) > 1e-3);
        let odd3 = RadialProfile::new(2, 1, 1.0).unwrap();
        assert!(lattice_residue(&odd3, 2, 7, 3) > 1e-6);
    }

    #[test]
    fn center_indicial_roots() {
        let p = RadialProfile::hyperbolic(2);
        for l in [0u32, 1, 5] {
            let s = frobenius_center::<f64>(&p, &params(2, l, Complex64::new(1.0, 2.0)), 40);
            assert!((s.indicial_roots[0] - l as f64).abs() < 1e-9);
            assert!((s.indicial_roots[1] + (l as f64 + 1.0)).abs() < 1e-9);
        }
        // l = 0: nonzero limit at the center
        let s = frobenius_center::<f64>(&p, &params(2, 0, Complex64::new(1.0, 2.0)), 40);
        let (u, _) = s.eval_scaled(1e-6);
        assert!((u - Complex64::new(1.0, 0.0)).norm() < 1e-5);
    }

    #[test]
    fn center_series_solves_the_ode() {
        let p = RadialProfile::hyperbolic(3);
        let pr = params(3, 2, Complex64::new(0.7, 1.3));
        let s = frobenius_center::<f64>(&p, &pr, 40);
        // Check u'' from the ODE against a difference quotient of u'.
        let x = 2.0 - 0.05;
        let h = 1e-5;
        let val = |x: f64| {
            let t: f64 = 2.0 - x;
            let (u, du) = s.eval_scaled(t);
            let sc = t.powi(2);
            (u * sc, du * sc)
        };
        let (u, du) = val(x);
        let (_, dup) = val(x + h);
        let (_, dum) = val(x - h);
        let upp = (dup - dum) / (2.0 * h);
        let (d, dp) = p.eval_unchecked(x);
        let r = -x * x * upp + 2.0 * x * du - 1.5 * dp / d * x * x * du + x * x / d * pr.v() * u - pr.s() * u;
        let scale = (x * x * upp).norm() + (pr.s() * u).norm();
        assert!(r.norm() / scale < 1e-7, "{}", r.norm() / scale);
    }
}
