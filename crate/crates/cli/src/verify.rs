//! The acceptance suite behind `ahscatter verify`.

use std::fmt;
use std::path::{Path, PathBuf};

use ahscatter::gz::{scattering_residues, WarpedMetricJet};
use ahscatter::normalform::{omega_jet, FourierJet};
use ahscatter::polescan::{
    a_evaluator, eigenvalue_scan, m_k, regularization_in, winding_count, AccumulationOptions, AccumulationReport,
    ResonanceHit, ScanRegion,
};
use ahscatter::radial::{
    alpha_l, connection_coeffs, half_lattice_distance, ConnectionOptions, ModeParams, RadialProfile,
};
use ahscatter::ring::{int, rat, Rational};
use ahscatter::special::hyperbolic_mode_s;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::engines::{connection_options, write_accumulation};
use crate::output;
use crate::CliError;

/// Sub-checks expected to fail, with the reason. A listed check that passes
/// is itself reported as a failure.
pub const KNOWN_FAILURES: [(&str, &str); 1] = [(
    "5d",
    "zeros sit at (n-λ_k) - m_k α^(1+2k), so the ratio as defined tends to -1",
)];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub id: String,
    pub name: String,
    pub measured: String,
    pub threshold: String,
    pub passed: bool,
    pub known_failure: Option<String>,
}

impl Criterion {
    fn new(id: &str, name: &str, measured: String, threshold: &str, passed: bool) -> Self {
        let known_failure = KNOWN_FAILURES
            .iter()
            .find(|(k, _)| *k == id)
            .map(|(_, why)| why.to_string());
        Criterion {
            id: id.into(),
            name: name.into(),
            measured,
            threshold: threshold.into(),
            passed,
            known_failure,
        }
    }

    /// Whether the outcome is the expected one.
    pub fn as_expected(&self) -> bool {
        self.passed != self.known_failure.is_some()
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {} {}: {} ({})", self.id, self.name, self.measured, self.threshold)?;
        if let Some(why) = &self.known_failure {
            write!(f, " [known failure: {why}]")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub criteria: Vec<Criterion>,
    pub passed: usize,
    pub failed: usize,
    pub unexpected: Vec<String>,
}

fn e(x: f64) -> String {
    format!("{x:.3e}")
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn small_rat(r: &mut ChaCha8Rng) -> Rational {
    rat(r.gen_range(-6..=6), r.gen_range(1..=5))
}

/// `1 + Σ w_j x^j` through `x^order`, even below `2k+1`, with `w_{2k+1} ≠ 0`.
fn random_even_metric(r: &mut ChaCha8Rng, k: usize, order: usize) -> Vec<Rational> {
    let mut w = vec![int(1)];
    for j in 1..=order {
        w.push(if j % 2 == 1 && j < 2 * k + 1 { int(0) } else { small_rat(r) });
    }
    while w[2 * k + 1] == int(0) {
        w[2 * k + 1] = small_rat(r);
    }
    w
}

fn criterion_1(seed: u64) -> Result<Criterion, CliError> {
    let mut r = rng(seed, 1);
    let mut cases = Vec::new();
    for n in 2..=4u32 {
        for k in 0..=2usize {
            for _ in 0..20 {
                cases.push((n, k, random_even_metric(&mut r, k, 2 * k + 3)));
            }
        }
    }
    let ok: Vec<bool> = cases
        .par_iter()
        .map(|(n, k, w)| {
            let m = WarpedMetricJet::from_coeffs(*n, w.clone(), 2 * k + 3)?;
            let c = scattering_residues(&m, *k)?.checks;
            Ok::<_, CliError>(
                c.lower_residues_vanish
                    && c.leading_residue_matches
                    && c.symbol_matches
                    && c.symbol_vanishes == c.vanishing_condition_holds,
            )
        })
        .collect::<Result<_, _>>()?;
    let good = ok.iter().filter(|&&b| b).count();
    Ok(Criterion::new(
        "1",
        "exact residue identities",
        format!("{good}/{} metrics", ok.len()),
        "all exact",
        good == ok.len(),
    ))
}

const Q: usize = 8;

fn real_modes(r: &mut ChaCha8Rng, deg: usize, amp: f64) -> Vec<Complex64> {
    let mut row = vec![Complex64::new(0.0, 0.0); 2 * Q + 1];
    for q in 1..=deg {
        let z = Complex64::new(r.gen_range(-amp..amp), r.gen_range(-amp..amp));
        row[Q + q] = z;
        row[Q - q] = z.conj();
    }
    row
}

fn criterion_2(seed: u64) -> Result<Criterion, CliError> {
    const M: usize = 10;
    let mut r = rng(seed, 2);
    let mut worst: f64 = 0.0;
    for k in 1..=2usize {
        for _ in 0..20 {
            let rows: Vec<Vec<Complex64>> = (0..=M).map(|_| real_modes(&mut r, 2, 0.1)).collect();
            let mut w = FourierJet::from_modes(Q, rows)?;
            w.set(0, 0, Complex64::new(1.0, 0.0));
            for m in (1..2 * k + 1).step_by(2) {
                for q in -(Q as i64)..=Q as i64 {
                    w.set(m, q, Complex64::new(0.0, 0.0));
                }
            }
            let om0 = real_modes(&mut r, 3, 0.3);
            let jet = omega_jet(&w, &om0, M)?;
            worst = worst.max(max_of((1..=2 * k + 1).step_by(2).map(|m| jet.max_modulus(m))));
        }
    }
    Ok(Criterion::new(
        "2",
        "odd ω coefficients vanish",
        e(worst),
        "< 1e-10",
        worst < 1e-10,
    ))
}

fn off_lattice_lambda(r: &mut ChaCha8Rng, n: u32) -> Complex64 {
    loop {
        let lam = Complex64::new(r.gen_range(-1.0..n as f64 + 1.0), r.gen_range(-3.0..3.0));
        if half_lattice_distance(n, lam) > 0.1 {
            return lam;
        }
    }
}

fn criterion_3(seed: u64, opts: &ConnectionOptions) -> Result<Criterion, CliError> {
    let mut r = rng(seed, 3);
    let mut jobs = Vec::new();
    for n in 2..=3u32 {
        for l in 0..=10u32 {
            for _ in 0..30 {
                jobs.push((n, l, off_lattice_lambda(&mut r, n)));
            }
        }
    }
    let errs: Vec<f64> = jobs
        .par_iter()
        .map(|&(n, l, lam)| {
            let d = connection_coeffs(&RadialProfile::hyperbolic(n), &ModeParams::new(n, l, lam), opts)?;
            let s = hyperbolic_mode_s(n, l, lam);
            Ok::<_, CliError>((d.s - s).norm() / s.norm())
        })
        .collect::<Result<_, _>>()?;
    let worst = max_of(errs);
    Ok(Criterion::new(
        "3",
        "hyperbolic S matches the Gamma fixture",
        format!("{} over {} points", e(worst), jobs.len()),
        "relative < 1e-8",
        worst < 1e-8,
    ))
}

fn criterion_4(seed: u64, opts: &ConnectionOptions) -> Result<Vec<Criterion>, CliError> {
    let mut r = rng(seed, 4);
    let perturbed = [(2, 0), (2, 1), (3, 0)].map(|(n, k)| RadialProfile { n, k, c: 1.0 });

    let mut moves = Vec::new();
    for p in &perturbed {
        for l in [0u32, 2, 5, 10] {
            for _ in 0..4 {
                moves.push((p.clone(), l, off_lattice_lambda(&mut r, p.n)));
            }
        }
    }
    let drift: Vec<(f64, f64)> = moves
        .par_iter()
        .map(|(p, l, lam)| {
            let params = ModeParams::new(p.n, *l, *lam);
            let base = connection_coeffs(p, &params, &ConnectionOptions { x0: 0.2, ..opts.clone() })?;
            let mut rel: f64 = 0.0;
            let mut wr = base.wronskian_defect.unwrap_or(f64::INFINITY);
            for x0 in [0.1, 0.3] {
                let d = connection_coeffs(p, &params, &ConnectionOptions { x0, ..opts.clone() })?;
                rel = rel
                    .max((d.a - base.a).norm() / base.a.norm())
                    .max((d.b - base.b).norm() / base.b.norm());
                wr = wr.max(d.wronskian_defect.unwrap_or(f64::INFINITY));
            }
            Ok::<_, CliError>((rel, wr))
        })
        .collect::<Result<_, _>>()?;
    let invariance = max_of(drift.iter().map(|d| d.0));
    let wronskian = max_of(drift.iter().map(|d| d.1));

    let mut line = Vec::new();
    for p in [RadialProfile::hyperbolic(2), perturbed[0].clone(), perturbed[2].clone()] {
        for l in 0..=10u32 {
            for i in 0..6 {
                let t = 0.5 + 0.9 * i as f64;
                line.push((p.clone(), l, Complex64::new(p.n as f64 / 2.0, t)));
            }
        }
    }
    let unitarity = max_of(
        line.par_iter()
            .map(|(p, l, lam)| {
                let d = connection_coeffs(p, &ModeParams::new(p.n, *l, *lam), opts)?;
                Ok::<_, CliError>((d.s.norm() - 1.0).abs())
            })
            .collect::<Result<Vec<_>, _>>()?,
    );

    let mut pairs = Vec::new();
    for _ in 0..20 {
        let p = perturbed[r.gen_range(0..perturbed.len())].clone();
        let l = r.gen_range(0..=10u32);
        let lam = off_lattice_lambda(&mut r, p.n);
        pairs.push((p, l, lam));
    }
    let reciprocity = max_of(
        pairs
            .par_iter()
            .map(|(p, l, lam)| {
                let s1 = connection_coeffs(p, &ModeParams::new(p.n, *l, *lam), opts)?.s;
                let s2 = connection_coeffs(p, &ModeParams::new(p.n, *l, p.n as f64 - lam), opts)?.s;
                Ok::<_, CliError>((s1 * s2 - 1.0).norm())
            })
            .collect::<Result<Vec<_>, _>>()?,
    );

    Ok(vec![
        Criterion::new(
            "4a",
            "match-point invariance of A, B",
            e(invariance),
            "relative ≤ 1e-8 over x0 ∈ {0.1, 0.2, 0.3}",
            invariance <= 1e-8,
        ),
        Criterion::new("4b", "scaled Wronskian drift", e(wronskian), "< 1e-10", wronskian < 1e-10),
        Criterion::new("4c", "|S| = 1 on Re λ = n/2", e(unitarity), "≤ 1e-8", unitarity <= 1e-8),
        Criterion::new("4d", "S(λ) S(n-λ) = 1", e(reciprocity), "≤ 1e-8", reciprocity <= 1e-8),
    ])
}

fn experiment(k: u32, opts: &ConnectionOptions) -> Result<AccumulationReport, CliError> {
    let p = RadialProfile { n: 2, k, c: 1.0 };
    let aopts = AccumulationOptions {
        l_min: 5,
        l_max: 40,
        connection: opts.clone(),
        ..AccumulationOptions::default()
    };
    Ok(ahscatter::polescan::accumulation_experiment(&p, &aopts)?)
}

/// Simple hit closest to the accumulation point, per mode.
fn best_hits(rep: &AccumulationReport) -> Vec<&ResonanceHit> {
    let mut out: Vec<&ResonanceHit> = Vec::new();
    for h in rep.hits.iter().filter(|h| h.winding == 1) {
        let d = (h.zero - rep.accumulation_point).norm();
        match out.last_mut() {
            Some(last) if last.l == h.l => {
                if d < (last.zero - rep.accumulation_point).norm() {
                    *last = h;
                }
            }
            _ => out.push(h),
        }
    }
    out
}

/// `|λ* - λ0| / (|m_k| α^(1+2k))` over all simple hits, as `(min, max)`.
fn normalised_distances(rep: &AccumulationReport) -> (f64, f64) {
    let mk = m_k(rep.n, rep.k, rep.amplitude).abs();
    rep.hits
        .iter()
        .filter(|h| h.winding == 1)
        .map(|h| (h.zero - rep.accumulation_point).norm() / (mk * h.alpha_l.powi(1 + 2 * rep.k as i32)))
        .fold((f64::INFINITY, 0.0), |(lo, hi), d| (lo.min(d), hi.max(d)))
}

fn misses_from(rep: &AccumulationReport, l: u32) -> Vec<u32> {
    rep.fit.misses.iter().copied().filter(|&m| m >= l).collect()
}

fn in_disc((lo, hi): (f64, f64)) -> bool {
    lo >= 0.5 && hi <= 1.5
}

fn slope_check(id: &str, name: &str, rep: &AccumulationReport, target: f64, tol: f64) -> Criterion {
    let (measured, ok) = match rep.fit.slope {
        Some(s) => {
            let ci = rep
                .fit
                .slope_ci
                .map(|[a, b]| format!(", 95% CI [{a:.4}, {b:.4}]"))
                .unwrap_or_default();
            (format!("{s:.4}{ci}"), (s - target).abs() <= tol)
        }
        None => ("no fit".into(), false),
    };
    Criterion::new(id, name, measured, &format!("{target} ± {tol}"), ok)
}

fn criterion_5(k0: &AccumulationReport, k1: &AccumulationReport) -> Vec<Criterion> {
    let mut out = Vec::new();
    let miss0 = misses_from(k0, 10);
    out.push(Criterion::new(
        "5a",
        "k=0: a zero of A_l for every l ≥ 10",
        format!("{} modes, misses {:?}", best_hits(k0).len(), miss0),
        "no misses",
        miss0.is_empty(),
    ));
    let d0 = normalised_distances(k0);
    out.push(Criterion::new(
        "5b",
        "k=0: |λ* - 1/2| inside the disc bound",
        format!("[{:.4}, {:.4}] × (1/4)(1+v_l)^(-1/2)", d0.0, d0.1),
        "within [0.5, 1.5]",
        in_disc(d0),
    ));
    out.push(slope_check("5c", "k=0: log-distance slope", k0, -0.5, 0.05));
    let at40 = best_hits(k0).into_iter().find(|h| h.l == 40);
    let (measured, ok) = match at40 {
        Some(h) => (
            format!("ratio {:.4}{:+.1e}i, |ratio - 1| = {:.4}", h.ratio.re, h.ratio.im, (h.ratio - 1.0).norm()),
            (h.ratio - 1.0).norm() <= 0.25,
        ),
        None => ("no hit at l = 40".into(), false),
    };
    out.push(Criterion::new("5d", "k=0: ratio at l = 40", measured, "|ratio - 1| ≤ 0.25", ok));

    out.push(slope_check("5e", "k=1: log-distance slope", k1, -1.5, 0.1));
    let best1 = best_hits(k1);
    let last = best1.last().map(|h| (h.l, (h.zero - k1.accumulation_point).norm()));
    let decreasing = best1
        .windows(2)
        .filter(|w| w[0].l >= 10)
        .all(|w| (w[1].zero - k1.accumulation_point).norm() < (w[0].zero - k1.accumulation_point).norm());
    let (measured, ok) = match last {
        Some((l, d)) => (
            format!("point {}, |λ*(l={l}) + 1/2| = {}, decreasing {decreasing}", k1.accumulation_point, e(d)),
            k1.accumulation_point == -0.5 && l == 40 && d < 1e-3 && decreasing,
        ),
        None => ("no hits".into(), false),
    };
    out.push(Criterion::new(
        "5f",
        "k=1: zeros accumulate at -1/2",
        measured,
        "distance at l = 40 < 1e-3, decreasing for l ≥ 10",
        ok,
    ));
    let miss1 = misses_from(k1, 10);
    let d1 = normalised_distances(k1);
    out.push(Criterion::new(
        "5g",
        "k=1: hits for l ≥ 10 inside the disc bound",
        format!("misses {:?}, [{:.4}, {:.4}] × |m_1| α_l^3", miss1, d1.0, d1.1),
        "no misses, within [0.5, 1.5]",
        miss1.is_empty() && in_disc(d1),
    ));
    out
}

fn hyperbolic_box_region() -> Result<ScanRegion, CliError> {
    Ok(ScanRegion::new(Complex64::new(0.3, -0.1), Complex64::new(0.7, 0.1))?)
}

fn criterion_6(opts: &ConnectionOptions, zero_tol: f64) -> Result<Vec<Criterion>, CliError> {
    let p = RadialProfile::hyperbolic(2);
    let region = hyperbolic_box_region()?;
    let modes: Vec<u32> = (0..=20).collect();
    let windings: Vec<i64> = modes
        .par_iter()
        .map(|&l| {
            let conn = ConnectionOptions {
                regularize: regularization_in(&p, l, &region)?,
                ..opts.clone()
            };
            let f = a_evaluator(&p, l, &conn);
            let w = winding_count(&f, &region)?;
            Ok::<_, CliError>(w)
        })
        .collect::<Result<_, _>>()?;
    let nonzero: Vec<u32> = modes.iter().zip(&windings).filter(|(_, &w)| w != 0).map(|(&l, _)| l).collect();
    let eig: Vec<usize> = modes
        .par_iter()
        .map(|&l| Ok::<_, CliError>(eigenvalue_scan(&p, l, (1.05, 1.95), 64, zero_tol, opts)?.len()))
        .collect::<Result<_, _>>()?;
    let found: usize = eig.iter().sum();
    Ok(vec![
        Criterion::new(
            "6a",
            "hyperbolic: winding 0 in [0.3,0.7]×[-0.1,0.1], l ≤ 20",
            format!("nonzero at l = {nonzero:?}"),
            "all zero",
            nonzero.is_empty(),
        ),
        Criterion::new(
            "6b",
            "hyperbolic: no eigenvalues on (1.05, 1.95), l ≤ 20",
            format!("{found} found"),
            "none",
            found == 0,
        ),
    ])
}

/// Re-counts the winding in a box of side `10 tol` around every hit.
fn criterion_7(reps: &[&AccumulationReport], opts: &ConnectionOptions) -> Result<Criterion, CliError> {
    let jobs: Vec<(&AccumulationReport, &ResonanceHit)> =
        reps.iter().flat_map(|r| r.hits.iter().map(move |h| (*r, h))).collect();
    let aopts = AccumulationOptions::default();
    let ok: Vec<bool> = jobs
        .par_iter()
        .map(|&(rep, h)| {
            if h.winding != 1 {
                return Ok(false);
            }
            let p = RadialProfile { n: rep.n, k: rep.k, c: rep.amplitude };
            let eps = m_k(rep.n, rep.k, rep.amplitude).abs() * alpha_l(rep.n, h.l).powi(1 + 2 * rep.k as i32) / 2.0;
            let tol = aopts.rel_tol * eps;
            let conn = ConnectionOptions {
                regularize: rep.regularized_at,
                ..opts.clone()
            };
            let check = ScanRegion::centered(h.zero, 5.0 * tol).with_grid(4).with_tol(tol);
            let f = a_evaluator(&p, h.l, &conn);
            let w = winding_count(&f, &check)?;
            Ok::<_, CliError>(w == 1)
        })
        .collect::<Result<_, _>>()?;
    let good = ok.iter().filter(|&&b| b).count();
    Ok(Criterion::new(
        "7",
        "every hit re-validates with winding 1",
        format!("{good}/{} simple", ok.len()),
        "all simple",
        good == ok.len() && !ok.is_empty(),
    ))
}

pub fn verify_report(cfg: &RunConfig) -> Result<(VerifyReport, [AccumulationReport; 2]), CliError> {
    let opts = connection_options(cfg);
    let mut criteria = vec![criterion_1(cfg.seed)?, criterion_2(cfg.seed)?, criterion_3(cfg.seed, &opts)?];
    criteria.extend(criterion_4(cfg.seed, &opts)?);
    let k0 = experiment(0, &opts)?;
    let k1 = experiment(1, &opts)?;
    criteria.extend(criterion_5(&k0, &k1));
    criteria.extend(criterion_6(&opts, cfg.tolerances.zero_tol)?);
    criteria.push(criterion_7(&[&k0, &k1], &opts)?);
    let passed = criteria.iter().filter(|c| c.passed).count();
    let unexpected = criteria.iter().filter(|c| !c.as_expected()).map(|c| c.id.clone()).collect();
    let report = VerifyReport {
        seed: cfg.seed,
        passed,
        failed: criteria.len() - passed,
        criteria,
        unexpected,
    };
    Ok((report, [k0, k1]))
}

pub fn run_verify(cfg: &RunConfig, out: &Path, svg: bool) -> Result<Vec<PathBuf>, CliError> {
    let (report, [k0, k1]) = verify_report(cfg)?;
    let mut written = vec![output::write_json(&out.join("verify.json"), &report)?];
    written.extend(write_accumulation(&k0, out, "accumulation_k0", svg)?);
    written.extend(write_accumulation(&k1, out, "accumulation_k1", svg)?);
    for c in &report.criteria {
        println!("{c}");
    }
    if report.failed > 0 {
        return Err(CliError::VerifyFailed { failed: report.failed });
    }
    Ok(written)
}
