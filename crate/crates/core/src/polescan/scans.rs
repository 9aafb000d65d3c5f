use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::{locate_zeros, winding_count, PolescanError, ScanRegion};
use crate::radial::{
    a_coefficient, alpha_l, lattice_residue, v_l, ConnectionOptions, ModeParams, RadialError, RadialProfile,
};
use crate::special::c_lambda;

/// Below this relative residue a lattice point is treated as removable.
const RESIDUE_FLOOR: f64 = 1e-12;

/// Lattice point of the `x^λ` branch inside `region` that is a true pole of
/// `A_l`, if any. More than one such point is rejected.
pub fn regularization_in(p: &RadialProfile, l: u32, region: &ScanRegion) -> Result<Option<usize>, PolescanError> {
    if region.lo.im > 0.0 || region.hi.im < 0.0 {
        return Ok(None);
    }
    let n = p.n as f64;
    // λ = (n - m)/2 for m ≥ 1 inside [lo.re, hi.re]
    let m_lo = (n - 2.0 * region.hi.re).ceil().max(1.0) as i64;
    let m_hi = (n - 2.0 * region.lo.re).floor() as i64;
    let mut found = None;
    for m in m_lo..=m_hi {
        if m < 1 {
            continue;
        }
        let m = m as usize;
        if lattice_residue(p, p.n, l, m) > RESIDUE_FLOOR {
            if found.is_some() {
                return Err(PolescanError::InvalidRegion(
                    "more than one pole of A inside the region".into(),
                ));
            }
            found = Some(m);
        }
    }
    Ok(found)
}

/// `λ ↦ Â_l(λ)`: `A_l` times `n - 2λ - m0` when a pole at `m0` is lifted.
pub fn a_evaluator<'a>(
    p: &'a RadialProfile,
    l: u32,
    opts: &'a ConnectionOptions,
) -> impl Fn(Complex64) -> Result<Complex64, RadialError> + Sync + 'a {
    let n = p.n;
    move |lam| a_coefficient(p, &ModeParams::new(n, l, lam), opts).map(|a| a.a_hat)
}

/// Real zeros of `A_l` on `(lo, hi) ⊂ (n/2, n)`: eigenvalue parameters `λ_e`.
pub fn eigenvalue_scan(
    p: &RadialProfile,
    l: u32,
    interval: (f64, f64),
    samples: usize,
    tol: f64,
    opts: &ConnectionOptions,
) -> Result<Vec<f64>, PolescanError> {
    let n = p.n as f64;
    let (lo, hi) = interval;
    if !(n / 2.0 <= lo && lo < hi && hi <= n) {
        return Err(PolescanError::InvalidRegion(format!("({lo}, {hi}) is not inside (n/2, n)")));
    }
    for end in [lo, hi] {
        let j = (2.0 * end - n).round();
        let dist = (2.0 * end - n - j).abs();
        if dist <= opts.lattice_guard {
            return Err(RadialError::LatticeGuard {
                m: j.abs() as usize,
                distance: dist,
            }
            .into());
        }
    }
    let opts = ConnectionOptions {
        regularize: None,
        ..opts.clone()
    };
    let f = a_evaluator(p, l, &opts);
    let re = |x: f64| f(Complex64::new(x, 0.0)).map(|a| a.re);
    let xs: Vec<f64> = (0..=samples).map(|i| lo + (hi - lo) * i as f64 / samples as f64).collect();
    let vals: Vec<f64> = xs.par_iter().map(|&x| re(x)).collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    for i in 0..samples {
        let (mut a, mut b) = (xs[i], xs[i + 1]);
        let (mut fa, fb) = (vals[i], vals[i + 1]);
        if fa == 0.0 {
            out.push(a);
            continue;
        }
        if fa.signum() == fb.signum() {
            continue;
        }
        while b - a > tol {
            let m = 0.5 * (a + b);
            let fm = re(m)?;
            if fm == 0.0 {
                a = m;
                b = m;
                break;
            }
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        let root = 0.5 * (a + b);
        let h = 5.0 * tol.max(1e-12 * root.abs());
        let check = ScanRegion::centered(Complex64::new(root, 0.0), h).with_grid(4).with_tol(tol);
        let w = winding_count(&f, &check)?;
        if w != 1 {
            return Err(PolescanError::Unresolved {
                lo: check.lo,
                hi: check.hi,
                winding: w,
            });
        }
        out.push(root);
    }
    Ok(out)
}

/// `n - λ_k = (n-1)/2 - k`, the accumulation point.
pub fn lambda0(n: u32, k: u32) -> f64 {
    (n as f64 - 1.0) / 2.0 - k as f64
}

/// `m_k = c(n - λ_k) n (n - λ_k) / 4`, scaled by the perturbation amplitude.
pub fn m_k(n: u32, k: u32, amplitude: f64) -> f64 {
    let l0 = lambda0(n, k);
    amplitude * c_lambda(n, Complex64::new(l0, 0.0)).re * n as f64 * l0 / 4.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceHit {
    pub l: u32,
    pub v_l: f64,
    pub alpha_l: f64,
    pub zero: Complex64,
    pub winding: i64,
    pub newton_residual: f64,
    /// `(n - λ_k) + m_k α_l^(1+2k)`.
    pub predicted: Complex64,
    /// `(λ* - (n - λ_k)) / (m_k α_l^(1+2k))`.
    pub ratio: Complex64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    /// Least-squares slope of `ln|λ* - (n-λ_k)|` against `ln(1 + v_l)`.
    pub slope: Option<f64>,
    /// 95% confidence interval of the slope.
    pub slope_ci: Option<[f64; 2]>,
    pub m_k_used: f64,
    /// Modes whose box had no zero.
    pub misses: Vec<u32>,
    pub expected_slope: f64,
    /// Number of modes entering the fit.
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccumulationReport {
    pub n: u32,
    pub k: u32,
    pub amplitude: f64,
    pub accumulation_point: f64,
    pub regularized_at: Option<usize>,
    pub hits: Vec<ResonanceHit>,
    pub fit: FitSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AccumulationOptions {
    pub l_min: u32,
    pub l_max: u32,
    /// Smallest mode entering the slope fit.
    pub fit_from: u32,
    /// Box half-width in units of `ε_l = |m_k| α_l^(1+2k) / 2`.
    pub box_factor: f64,
    pub grid: usize,
    /// Zero tolerance in units of `ε_l`.
    pub rel_tol: f64,
    pub connection: ConnectionOptions,
}

impl Default for AccumulationOptions {
    fn default() -> Self {
        AccumulationOptions {
            l_min: 5,
            l_max: 40,
            fit_from: 10,
            box_factor: 3.0,
            grid: 16,
            rel_tol: 1e-8,
            connection: ConnectionOptions::default(),
        }
    }
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (Option<f64>, Option<[f64; 2]>) {
    if xs.len() < 2 {
        return (None, None);
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    if xs.len() < 3 {
        return (Some(slope), None);
    }
    let icpt = my - slope * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - icpt - slope * x).powi(2)).sum();
    let se = (rss / (n - 2.0) / sxx).sqrt();
    let ci = StudentsT::new(0.0, 1.0, n - 2.0)
        .ok()
        .map(|d| d.inverse_cdf(0.975))
        .map(|t| [slope - t * se, slope + t * se]);
    (Some(slope), ci)
}

/// Scans one box per mode `l_min..=l_max` around the accumulation point.
pub fn accumulation_experiment(
    p: &RadialProfile,
    opts: &AccumulationOptions,
) -> Result<AccumulationReport, PolescanError> {
    let (n, k) = (p.n, p.k);
    if 2 * k + 1 == n {
        return Err(PolescanError::Hypothesis(format!("2k = n - 1 for n = {n}, k = {k}")));
    }
    if p.is_hyperbolic() {
        return Err(PolescanError::Hypothesis("the perturbation amplitude is zero".into()));
    }
    if opts.l_min > opts.l_max {
        return Err(PolescanError::InvalidRegion(format!("empty mode range {}..={}", opts.l_min, opts.l_max)));
    }
    let l0 = lambda0(n, k);
    let mk = m_k(n, k, p.c);
    let power = 1 + 2 * k as i32;
    let m0 = 1 + 2 * k as usize;
    let regularize = (lattice_residue(p, n, opts.l_max, m0) > RESIDUE_FLOOR).then_some(m0);
    let conn = ConnectionOptions {
        regularize,
        ..opts.connection.clone()
    };
    let modes: Vec<u32> = (opts.l_min..=opts.l_max).collect();
    let per_mode: Vec<Result<Vec<ResonanceHit>, PolescanError>> = modes
        .par_iter()
        .map(|&l| {
            let alpha = alpha_l(n, l);
            let scale = mk * alpha.powi(power);
            let eps = scale.abs() / 2.0;
            let center = Complex64::new(l0, 0.0);
            let region = ScanRegion::centered(center, opts.box_factor * eps)
                .with_grid(opts.grid)
                .with_tol(opts.rel_tol * eps);
            let f = a_evaluator(p, l, &conn);
            let zeros = locate_zeros(&f, &region)?;
            Ok(zeros
                .into_iter()
                .map(|z| ResonanceHit {
                    l,
                    v_l: v_l(n, l),
                    alpha_l: alpha,
                    zero: z.lambda,
                    winding: z.winding,
                    newton_residual: z.newton_residual,
                    predicted: center + scale,
                    ratio: (z.lambda - center) / scale,
                })
                .collect())
        })
        .collect();

    let mut hits = Vec::new();
    let mut misses = Vec::new();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (&l, res) in modes.iter().zip(per_mode) {
        let found = res?;
        let simple: Vec<&ResonanceHit> = found.iter().filter(|h| h.winding == 1).collect();
        if simple.is_empty() {
            misses.push(l);
        } else if l >= opts.fit_from {
            let best = simple.iter().map(|h| (h.zero - l0).norm()).fold(f64::INFINITY, f64::min);
            xs.push((1.0 + v_l(n, l)).ln());
            ys.push(best.ln());
        }
        hits.extend(found);
    }
    let (slope, slope_ci) = least_squares(&xs, &ys);
    Ok(AccumulationReport {
        n,
        k,
        amplitude: p.c,
        accumulation_point: l0,
        regularized_at: regularize,
        hits,
        fit: FitSummary {
            slope,
            slope_ci,
            m_k_used: mk,
            misses,
            expected_slope: -(1.0 + 2.0 * k as f64) / 2.0,
            points: xs.len(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m_k_reference_values() {
        assert!((m_k(2, 0, 1.0) + 0.25).abs() < 1e-13);
        assert!((m_k(2, 1, 1.0) + 0.75).abs() < 1e-12);
        assert_eq!(lambda0(2, 0), 0.5);
        // predicted n - z_l at l = 10
        let pred = lambda0(2, 0) + m_k(2, 0, 1.0) * alpha_l(2, 10);
        assert!((pred - 0.4763).abs() < 5e-5);
    }

    #[test]
    fn least_squares_recovers_a_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [0.5, 0.0, -0.5, -1.0];
        let (s, ci) = least_squares(&xs, &ys);
        let (s, ci) = (s.unwrap(), ci.unwrap());
        assert!((s + 0.5).abs() < 1e-14);
        assert!(ci[0] <= s && s <= ci[1]);
        assert_eq!(least_squares(&xs[..1], &ys[..1]), (None, None));
    }

    #[test]
    fn hyperbolic_box_has_no_zero_and_no_regularisation() {
        let p = RadialProfile::hyperbolic(2);
        let region = ScanRegion::new(Complex64::new(0.3, -0.1), Complex64::new(0.7, 0.1)).unwrap();
        assert_eq!(regularization_in(&p, 3, &region).unwrap(), None);
        let opts = ConnectionOptions::default();
        let f = a_evaluator(&p, 3, &opts);
        assert_eq!(winding_count(&f, &region).unwrap(), 0);
    }

    #[test]
    fn perturbed_box_has_one_simple_zero() {
        let p = RadialProfile::new(2, 0, 1.0).unwrap();
        let l = 12;
        let alpha = alpha_l(2, l);
        let region = ScanRegion::centered(Complex64::new(0.5, 0.0), 0.375 * alpha);
        let m0 = regularization_in(&p, l, &region).unwrap();
        assert_eq!(m0, Some(1));
        let opts = ConnectionOptions {
            regularize: m0,
            ..Default::default()
        };
        let zs = locate_zeros(&a_evaluator(&p, l, &opts), &region).unwrap();
        assert_eq!(zs.len(), 1);
        assert!(zs[0].simple);
        let dist = (zs[0].lambda - 0.5).norm() / (0.25 * alpha);
        assert!((0.5..=1.5).contains(&dist), "{dist}");
    }

    #[test]
    fn eigenvalue_scan_rejects_lattice_endpoints() {
        let p = RadialProfile::hyperbolic(2);
        let e = eigenvalue_scan(&p, 1, (1.5, 1.9), 16, 1e-10, &ConnectionOptions::default()).unwrap_err();
        assert!(matches!(e, PolescanError::Radial(RadialError::LatticeGuard { .. })));
        assert!(eigenvalue_scan(&p, 1, (1.05, 1.95), 16, 1e-10, &ConnectionOptions::default())
            .unwrap()
            .is_empty());
    }
}
