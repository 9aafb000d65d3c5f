use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};

use super::frobenius::{frobenius_boundary_at, frobenius_center, lattice_distance, BoundarySetup, FrobeniusSeries};
use super::integrate::{next_h, try_step, System, Tableau};
use super::{Branch, ModeParams, RadialError, RadialProfile, KNOT_A, KNOT_B};
use crate::real::{ComplexExt, DoubleDouble, Precision, QuadDouble, Real};

const MAX_STEPS: usize = 400_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConnectionOptions {
    /// Match point, at most `KNOT_A`.
    pub x0: f64,
    /// Start of the integration at `x = 2 - delta`.
    pub delta: f64,
    pub center_order: usize,
    pub boundary_max_order: usize,
    /// Relative tolerance of the integrator in double precision.
    pub ode_rtol: f64,
    /// Rejection threshold on `|m(n - 2λ - m)|`.
    pub lattice_guard: f64,
    /// Precision escalation threshold on `condition · ε`, and the `|A|` floor
    /// of `mode_scattering`.
    pub tol: f64,
    /// Starting precision.
    pub precision: Precision,
    /// Track the scaled Wronskian of a companion solution.
    pub wronskian: bool,
    /// Multiply the `x^λ` branch by `n - 2λ - m0` and lift the guard at `m0`.
    pub regularize: Option<usize>,
}

impl Default for ConnectionOptions {
    fn default() -> Self {
        ConnectionOptions {
            x0: 0.2,
            delta: 1e-3,
            center_order: 40,
            boundary_max_order: 400,
            ode_rtol: 1e-12,
            lattice_guard: 1e-3,
            tol: 1e-8,
            precision: Precision::Double,
            wronskian: true,
            regularize: None,
        }
    }
}

impl ConnectionOptions {
    fn rtol(&self, prec: Precision) -> f64 {
        match prec {
            Precision::Double => self.ode_rtol,
            Precision::Dd => self.ode_rtol.min(1e-24),
            Precision::Qd => self.ode_rtol.min(1e-32),
        }
    }

    fn validate(&self) -> Result<(), RadialError> {
        if !(self.x0 > 0.0 && self.x0 <= KNOT_A) {
            return Err(RadialError::InvalidOption(format!("match point {} outside (0, {KNOT_A}]", self.x0)));
        }
        if !(self.delta > 0.0 && self.delta < 0.5) {
            return Err(RadialError::InvalidOption(format!("center offset {} outside (0, 0.5)", self.delta)));
        }
        if self.ode_rtol <= 0.0 || self.tol <= 0.0 {
            return Err(RadialError::InvalidOption("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Connection data of one mode, `u_reg = A x^(n-λ)(1+…) + B x^λ(1+…)`.
///
/// `u_reg` is normalised as `2^-l t^l (1 + O(t))` at the center, `t = 2 - x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectionData {
    pub lambda: Complex64,
    pub a: Complex64,
    pub b: Complex64,
    pub s: Complex64,
    /// `(n - 2λ - m0) A`, analytic across the lattice point `m0`; equal to
    /// `A` when no regularisation was requested.
    pub a_hat: Complex64,
    pub regularized_at: Option<usize>,
    pub wronskian_defect: Option<f64>,
    pub condition_estimate: f64,
    pub precision_used: Precision,
    pub x0: f64,
}

/// `A` (or its regularisation) without the `x^(n-λ)` branch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AValue {
    pub a: Complex64,
    pub a_hat: Complex64,
    /// `|A x0^(n-λ)| / |u_reg(x0)|`.
    pub relative: f64,
    pub condition_estimate: f64,
    pub precision_used: Precision,
}

struct ModeOde<T: Real> {
    p: RadialProfile,
    n1: T,
    half_n: T,
    v: Complex<T>,
    s: Complex<T>,
}

impl<T: Real> ModeOde<T> {
    fn new(p: &RadialProfile, params: &ModeParams) -> Self {
        let n = T::from_i64(params.n as i64);
        ModeOde {
            p: p.clone(),
            n1: n - T::one(),
            half_n: n.mul_pow2(-1),
            v: Complex::new(T::from_f64(params.v()), T::zero()),
            s: Complex::from_f64c(params.s()),
        }
    }
}

impl<T: Real, const D: usize> System<T, D> for ModeOde<T> {
    fn rhs(&self, x: T, y: &[Complex<T>; D]) -> [Complex<T>; D] {
        let (d, dp) = self.p.eval_unchecked(x);
        let inv_x = T::one() / x;
        let c1 = self.n1 * inv_x - self.half_n * dp / d;
        let c0 = self.v.scale(T::one() / d) - self.s.scale(inv_x * inv_x);
        let mut out = *y;
        for j in (0..D).step_by(2) {
            out[j] = y[j + 1];
            out[j + 1] = y[j + 1].scale(c1) + c0 * y[j];
        }
        out
    }

    fn group(&self, i: usize) -> usize {
        i / 2
    }
}

/// `ln(x^(n-1) d^(-n/2))` in double precision.
fn log_abel(n: u32, p: &RadialProfile, x: f64) -> f64 {
    let (d, _) = p.eval_unchecked(x);
    (n as f64 - 1.0) * x.ln() - 0.5 * n as f64 * d.ln()
}

/// Center-regular solution at `x0` as `(t0^-l u, t0^-l u')`, and the
/// Wronskian drift of a companion when `D = 4`.
fn integrate_regular<T: Real, const D: usize>(
    p: &RadialProfile,
    params: &ModeParams,
    opts: &ConnectionOptions,
    rtol: f64,
) -> Result<([Complex<T>; 2], Option<f64>), RadialError> {
    let sys = ModeOde::<T>::new(p, params);
    let tab = Tableau::<T>::new();
    let two = T::from_f64(2.0);
    let delta = T::from_f64(opts.delta);
    let center = frobenius_center::<T>(p, params, opts.center_order);
    let (u0, du0) = center.eval_scaled(delta);
    let zero = Complex::new(T::zero(), T::zero());
    let mut y = [zero; D];
    y[0] = u0;
    y[1] = du0;
    if D == 4 {
        y[3] = Complex::new(T::one(), T::zero());
    }
    let l = params.l as i32;
    let rtol_t = T::from_f64(rtol);

    let mut x = two - delta;
    let mut h = -(delta / T::from_f64(4.0 * (params.l as f64 + 1.0)));
    let mut targets: Vec<f64> = vec![KNOT_B, KNOT_A, opts.x0];
    targets.retain(|&xt| xt < x.to_f64() && xt >= opts.x0);
    targets.dedup();

    // Wronskian bookkeeping in logs: W(y1, y2) = W0 · exp(2 ls) · F(x) / F(x_start).
    let x_start = x.to_f64();
    let log_f0 = log_abel(params.n, p, x_start);
    let w0 = if D == 4 { (y[0] * y[3] - y[1] * y[2]).to_f64c() } else { Complex64::new(0.0, 0.0) };
    let mut log_scale = 0.0f64;
    let mut defect = 0.0f64;

    let mut steps = 0usize;
    for &xt in &targets {
        let target = T::from_f64(xt);
        while x > target {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(RadialError::IntegratorFailure {
                    x: x.to_f64(),
                    reason: format!("more than {MAX_STEPS} steps"),
                });
            }
            let clamped = x + h <= target;
            let h_try = if clamped { target - x } else { h };
            if h_try.abs().to_f64() < 1e-14 * x.to_f64().abs().max(1e-300) {
                return Err(RadialError::IntegratorFailure {
                    x: x.to_f64(),
                    reason: "step size underflow".into(),
                });
            }
            let (ny, err) = try_step(&sys, &tab, x, &y, h_try, rtol_t);
            if !err.is_finite() {
                h = h_try.mul_pow2(-2);
                continue;
            }
            if err <= 1.0 {
                let x_new = if clamped { target } else { x + h_try };
                let ta = two - x;
                let tb = two - x_new;
                let f = (ta / tb).powi(l);
                y = ny;
                for yi in y.iter_mut() {
                    *yi = yi.scale(f);
                }
                x = x_new;
                if D == 4 {
                    log_scale += l as f64 * (ta.to_f64() / tb.to_f64()).ln();
                    let xf = x.to_f64();
                    let w = (y[0] * y[3] - y[1] * y[2]).to_f64c();
                    let pred = w0 * (2.0 * log_scale + log_abel(params.n, p, xf) - log_f0).exp();
                    let mag = (y[0].abs_r() * y[3].abs_r() + y[1].abs_r() * y[2].abs_r()).to_f64();
                    if mag > 0.0 {
                        defect = defect.max((w - pred).norm() / mag);
                    }
                }
                if !clamped {
                    h = next_h(h_try, err);
                }
            } else {
                h = next_h(h_try, err);
            }
        }
    }
    Ok(([y[0], y[1]], if D == 4 { Some(defect) } else { None }))
}

fn boundary_series<T: Real>(
    p: &RadialProfile,
    params: &ModeParams,
    branch: Branch,
    opts: &ConnectionOptions,
    regularize: Option<usize>,
) -> Result<FrobeniusSeries<T>, RadialError> {
    let sigma = match branch {
        Branch::Lambda => params.lambda,
        Branch::NMinusLambda => params.n as f64 - params.lambda,
    };
    let (m, dist) = lattice_distance(params.n, sigma, opts.boundary_max_order, regularize);
    if dist <= opts.lattice_guard {
        return Err(RadialError::LatticeGuard { m, distance: dist });
    }
    let setup = BoundarySetup {
        guard: opts.lattice_guard,
        regularize,
    };
    let series = frobenius_boundary_at::<T>(p, params, branch, opts.x0, opts.boundary_max_order, &setup)
        .map_err(|e| match e {
            RadialError::IndicialCollision { m, distance } => RadialError::LatticeGuard { m, distance },
            other => other,
        })?;
    let last = series.coeffs.last().map(|a| a.to_f64c().norm()).unwrap_or(0.0) * opts.x0.powi(series.order() as i32);
    let first = series.coeffs[0].to_f64c().norm();
    if series.order() >= opts.boundary_max_order && last > 1e3 * T::EPSILON * first.max(1.0) {
        return Err(RadialError::IntegratorFailure {
            x: opts.x0,
            reason: format!("boundary series not converged at order {}", series.order()),
        });
    }
    Ok(series)
}

struct Raw {
    a: Complex64,
    a_hat: Complex64,
    b: Option<Complex64>,
    relative: f64,
    defect: Option<f64>,
    condition: f64,
}

fn compute<T: Real>(
    p: &RadialProfile,
    params: &ModeParams,
    opts: &ConnectionOptions,
    want_b: bool,
) -> Result<Raw, RadialError> {
    let rtol = opts.rtol(T::PRECISION);
    let (y, defect) = if opts.wronskian && want_b {
        integrate_regular::<T, 4>(p, params, opts, rtol)?
    } else {
        integrate_regular::<T, 2>(p, params, opts, rtol)?
    };
    let x0 = T::from_f64(opts.x0);
    let two = T::from_f64(2.0);
    let norm = ((two - x0).mul_pow2(-1)).powi(params.l as i32);
    let u = y[0].scale(norm);
    let du = y[1].scale(norm);

    let n = params.n;
    let lam: Complex<T> = Complex::from_f64c(params.lambda);
    let (d, _) = p.eval_unchecked(x0);
    let pair_w = (lam.scale(two) - Complex::new(T::from_i64(n as i64), T::zero()))
        .scale(x0.powi(n as i32 - 1) / d.sqrt().powi(n as i32));

    let sl = boundary_series::<T>(p, params, Branch::Lambda, opts, opts.regularize)?;
    let ul = sl.eval(x0);
    let a_hat = ((u * ul.du - du * ul.u) / pair_w).to_f64c();
    let eps = opts
        .regularize
        .map(|m0| n as f64 - 2.0 * params.lambda - m0 as f64)
        .unwrap_or(Complex64::new(1.0, 0.0));
    let a = a_hat / eps;

    let x0f = opts.x0;
    let u_abs = u.abs_r().to_f64();
    let du_abs = du.abs_r().to_f64();
    let pw = pair_w.abs_r().to_f64();
    let lam_re = params.lambda.re;
    let pow_nl = x0f.powf(n as f64 - lam_re);
    let terms_a = u_abs * ul.du.abs_r().to_f64() + du_abs * ul.u.abs_r().to_f64();
    let mut condition = ul.cancellation * terms_a * pow_nl / (pw * u_abs);
    let relative = a.norm() * pow_nl / u_abs;

    let b = if want_b {
        let sn = boundary_series::<T>(p, params, Branch::NMinusLambda, opts, None)?;
        let un = sn.eval(x0);
        let b = ((un.u * du - un.du * u) / pair_w).to_f64c();
        let terms_b = u_abs * un.du.abs_r().to_f64() + du_abs * un.u.abs_r().to_f64();
        let cond_b = un.cancellation * terms_b * x0f.powf(lam_re) / (pw * u_abs);
        condition = condition.max(cond_b);
        Some(b)
    } else {
        None
    };
    if !condition.is_finite() {
        condition = f64::INFINITY;
    }
    Ok(Raw {
        a,
        a_hat,
        b,
        relative,
        defect,
        condition,
    })
}

fn escalate(
    p: &RadialProfile,
    params: &ModeParams,
    opts: &ConnectionOptions,
    want_b: bool,
) -> Result<(Raw, Precision), RadialError> {
    opts.validate()?;
    if params.n != p.n {
        return Err(RadialError::InvalidOption(format!(
            "mode dimension {} differs from profile dimension {}",
            params.n, p.n
        )));
    }
    let mut prec = opts.precision;
    loop {
        let raw = match prec {
            Precision::Double => compute::<f64>(p, params, opts, want_b)?,
            Precision::Dd => compute::<DoubleDouble>(p, params, opts, want_b)?,
            Precision::Qd => compute::<QuadDouble>(p, params, opts, want_b)?,
        };
        if raw.condition * prec.epsilon() <= opts.tol {
            return Ok((raw, prec));
        }
        match prec.next() {
            Some(next) => prec = next,
            None => {
                return Err(RadialError::IllConditioned {
                    condition: raw.condition,
                    precision: prec,
                })
            }
        }
    }
}

/// `A`, `B` and `S = B/A` for one mode, escalating precision as needed.
pub fn connection_coeffs(
    p: &RadialProfile,
    params: &ModeParams,
    opts: &ConnectionOptions,
) -> Result<ConnectionData, RadialError> {
    let (raw, prec) = escalate(p, params, opts, true)?;
    let b = raw.b.unwrap_or_default();
    Ok(ConnectionData {
        lambda: params.lambda,
        a: raw.a,
        b,
        s: b / raw.a,
        a_hat: raw.a_hat,
        regularized_at: opts.regularize,
        wronskian_defect: raw.defect,
        condition_estimate: raw.condition,
        precision_used: prec,
        x0: opts.x0,
    })
}

/// `A` alone; only the `x^λ` branch is built, so lattice points of the
/// reflected branch do not interfere.
pub fn a_coefficient(p: &RadialProfile, params: &ModeParams, opts: &ConnectionOptions) -> Result<AValue, RadialError> {
    let (raw, prec) = escalate(p, params, opts, false)?;
    Ok(AValue {
        a: raw.a,
        a_hat: raw.a_hat,
        relative: raw.relative,
        condition_estimate: raw.condition,
        precision_used: prec,
    })
}

/// `S_l(λ) = B/A`, refusing to divide by a vanishing `A`.
pub fn mode_scattering(p: &RadialProfile, params: &ModeParams, opts: &ConnectionOptions) -> Result<Complex64, RadialError> {
    let (raw, _) = escalate(p, params, opts, true)?;
    if raw.relative < opts.tol {
        return Err(RadialError::AtResonance { relative: raw.relative });
    }
    Ok(raw.b.unwrap_or_default() / raw.a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::hyperbolic_mode_s;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hyperbolic_unitarity_on_critical_line() {
        let p = RadialProfile::hyperbolic(2);
        let d = connection_coeffs(&p, &ModeParams::new(2, 0, c(1.0, 2.0)), &ConnectionOptions::default()).unwrap();
        assert!((d.s.norm() - 1.0).abs() < 1e-8, "{}", d.s.norm());
        assert!(d.wronskian_defect.unwrap() < 1e-10, "{:?}", d.wronskian_defect);
    }

    #[test]
    fn hyperbolic_matches_gamma_ratio() {
        for (n, l, lam) in [(2, 0, c(0.3, 0.4)), (2, 3, c(1.7, -2.0)), (3, 5, c(0.8, 1.1)), (3, 10, c(2.2, 0.3))] {
            let p = RadialProfile::hyperbolic(n);
            let s = mode_scattering(&p, &ModeParams::new(n, l, lam), &ConnectionOptions::default()).unwrap();
            let f = hyperbolic_mode_s(n, l, lam);
            assert!((s - f).norm() / f.norm() < 1e-8, "n={n} l={l} λ={lam}: {s} vs {f}");
        }
    }

    #[test]
    fn match_point_invariance() {
        let p = RadialProfile::new(2, 0, 1.0).unwrap();
        let params = ModeParams::new(2, 4, c(0.7, 0.9));
        let base = connection_coeffs(&p, &params, &ConnectionOptions::default()).unwrap();
        for x0 in [0.1, 0.3] {
            let opts = ConnectionOptions { x0, ..Default::default() };
            let d = connection_coeffs(&p, &params, &opts).unwrap();
            assert!((d.a - base.a).norm() / base.a.norm() < 1e-8);
            assert!((d.b - base.b).norm() / base.b.norm() < 1e-8);
        }
    }

    #[test]
    fn lattice_guard_and_regularisation() {
        let p = RadialProfile::new(2, 0, 1.0).unwrap();
        let params = ModeParams::new(2, 3, c(0.5 + 1e-6, 0.0));
        let err = a_coefficient(&p, &params, &ConnectionOptions::default()).unwrap_err();
        assert!(matches!(err, RadialError::LatticeGuard { m: 1, .. }));
        let opts = ConnectionOptions {
            regularize: Some(1),
            ..Default::default()
        };
        let a = a_coefficient(&p, &params, &opts).unwrap();
        assert!(a.a_hat.norm().is_finite() && a.a_hat.norm() > 0.0);
    }
}
