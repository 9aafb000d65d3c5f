use std::path::{Path, PathBuf};

use ahscatter::gz::{evenness_order, gz_solve, scattering_residues, Evenness, ResidueReport, WarpedMetricJet};
use ahscatter::normalform::{omega_jet, residual, FourierJet};
use ahscatter::polescan::{
    a_evaluator, accumulation_experiment, eigenvalue_scan, lambda0, locate_zeros, m_k, regularization_in,
    AccumulationOptions, AccumulationReport, FitSummary, ResonanceHit, ScanRegion,
};
use ahscatter::radial::{alpha_l, connection_coeffs, v_l, ConnectionOptions, ModeParams, RadialProfile};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{FourierEntry, RunConfig};
use crate::output::{self, EigenRow, ModeRow};
use crate::CliError;

/// Samples per eigenvalue scan interval before bisection.
const EIGEN_SAMPLES: usize = 64;

pub fn profile(cfg: &RunConfig) -> Result<RadialProfile, CliError> {
    Ok(RadialProfile::new(cfg.n, cfg.k, cfg.c.to_f64())?)
}

pub fn connection_options(cfg: &RunConfig) -> ConnectionOptions {
    ConnectionOptions {
        x0: cfg.x0,
        delta: cfg.delta,
        ode_rtol: cfg.tolerances.ode_rtol,
        lattice_guard: cfg.tolerances.lattice_guard,
        tol: cfg.tolerances.condition_tol,
        precision: cfg.precision,
        wronskian: true,
        ..ConnectionOptions::default()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GzReport {
    pub n: u32,
    pub order: usize,
    pub evenness: Evenness,
    /// `p_j` for `j = 0 … M`, as polynomials in `L` with coefficients in `λ`.
    pub p: Vec<String>,
    pub odd_p_zero: bool,
    pub k_trace: Option<String>,
    /// Absent when the jet is too short for the residues at its evenness.
    pub residues: Option<ResidueReport>,
}

pub fn gz_report(cfg: &RunConfig) -> Result<GzReport, CliError> {
    let w: Vec<_> = cfg.w.iter().flatten().map(|r| r.0.clone()).collect();
    let order = cfg.order.unwrap_or(w.len().saturating_sub(1));
    let jet = WarpedMetricJet::from_coeffs(cfg.n, w, order)?;
    let sol = gz_solve(&jet)?;
    let evenness = evenness_order(jet.w());
    let k = match evenness {
        Evenness::Finite(k) => k,
        Evenness::Infinite(_) => cfg.k as usize,
    };
    let residues = if order >= 2 * k + 3 {
        Some(scattering_residues(&jet, k)?)
    } else {
        None
    };
    Ok(GzReport {
        n: cfg.n,
        order,
        evenness,
        p: sol.p.iter().map(|p| p.to_string()).collect(),
        odd_p_zero: sol.p.iter().skip(1).step_by(2).all(|p| p.is_zero()),
        k_trace: sol.k_trace.map(|t| t.to_string()),
        residues,
    })
}

pub fn run_gz(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let report = gz_report(cfg)?;
    Ok(vec![output::write_json(&out.join("gz.json"), &report)?])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalFormReport {
    pub q_max: usize,
    pub order: usize,
    /// `k` such that `w` is even modulo `O(x^(2k+1))` but not beyond.
    pub w_evenness: Option<usize>,
    pub residual: f64,
    pub reality_defect: f64,
    /// `max_q |ω_m,q|` for each order `m`.
    pub max_modulus: Vec<f64>,
    pub omega: FourierJet,
}

fn fill(jet: &mut FourierJet, e: &FourierEntry) {
    let z = Complex64::new(e.re, e.im);
    jet.set(e.m, e.q, z);
    if e.q != 0 {
        jet.set(e.m, -e.q, z.conj());
    }
}

pub fn normalform_report(cfg: &RunConfig) -> Result<NormalFormReport, CliError> {
    let nf = &cfg.normalform;
    let mut w = FourierJet::zeros(nf.order, nf.q_max);
    for e in &nf.w {
        fill(&mut w, e);
    }
    let mut om0 = FourierJet::zeros(0, nf.q_max);
    for e in &nf.omega0 {
        fill(&mut om0, &FourierEntry { m: 0, ..e.clone() });
    }
    let omega = omega_jet(&w, om0.modes(0), nf.order)?;
    let w_evenness = (1..=nf.order)
        .step_by(2)
        .find(|&m| w.max_modulus(m) > 0.0)
        .map(|m| (m - 1) / 2);
    Ok(NormalFormReport {
        q_max: nf.q_max,
        order: nf.order,
        w_evenness,
        residual: residual(&w, &omega)?,
        reality_defect: omega.reality_defect(),
        max_modulus: (0..=nf.order).map(|m| omega.max_modulus(m)).collect(),
        omega,
    })
}

pub fn run_normalform(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let report = normalform_report(cfg)?;
    Ok(vec![output::write_json(&out.join("normalform.json"), &report)?])
}

pub fn mode_rows(cfg: &RunConfig) -> Result<Vec<ModeRow>, CliError> {
    let p = profile(cfg)?;
    let opts = connection_options(cfg);
    let jobs: Vec<(u32, Complex64)> = (cfg.l_range[0]..=cfg.l_range[1])
        .flat_map(|l| cfg.lambdas.iter().map(move |&[re, im]| (l, Complex64::new(re, im))))
        .collect();
    let rows: Vec<ModeRow> = jobs
        .par_iter()
        .map(|&(l, lam)| {
            let d = connection_coeffs(&p, &ModeParams::new(cfg.n, l, lam), &opts)?;
            Ok::<_, CliError>(ModeRow::new(cfg.n, l, &d))
        })
        .collect::<Result<_, _>>()?;
    if let Some(bad) = rows
        .iter()
        .find(|r| r.wronskian_defect.is_some_and(|w| w >= cfg.tolerances.wronskian_tol))
    {
        return Err(CliError::Numerical(format!(
            "Wronskian defect {:e} at l = {}, λ = {}{:+}i exceeds {:e}",
            bad.wronskian_defect.unwrap_or_default(),
            bad.l,
            bad.re_lambda,
            bad.im_lambda,
            cfg.tolerances.wronskian_tol
        )));
    }
    Ok(rows)
}

pub fn run_modes(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let rows = mode_rows(cfg)?;
    Ok(vec![output::write_csv(&out.join("modes.csv"), &rows)?])
}

/// Zeros of `A_l` in the configured region for each `l`, with predictions
/// from the accumulation formula where it applies.
pub fn resonance_hits(cfg: &RunConfig) -> Result<Vec<ResonanceHit>, CliError> {
    let Some(rc) = &cfg.region else {
        return Ok(Vec::new());
    };
    let p = profile(cfg)?;
    let base = connection_options(cfg);
    let region = ScanRegion::new(Complex64::new(rc.lo[0], rc.lo[1]), Complex64::new(rc.hi[0], rc.hi[1]))?
        .with_grid(rc.grid.unwrap_or(16))
        .with_tol(cfg.tolerances.zero_tol);
    let (n, k) = (cfg.n, cfg.k);
    let center = Complex64::new(lambda0(n, k), 0.0);
    let mk = m_k(n, k, p.c);
    let modes: Vec<u32> = (cfg.l_range[0]..=cfg.l_range[1]).collect();
    let per_mode: Vec<Vec<ResonanceHit>> = modes
        .par_iter()
        .map(|&l| {
            let conn = ConnectionOptions {
                regularize: regularization_in(&p, l, &region)?,
                ..base.clone()
            };
            let alpha = alpha_l(n, l);
            let scale = mk * alpha.powi(1 + 2 * k as i32);
            let zeros = locate_zeros(&a_evaluator(&p, l, &conn), &region)?;
            Ok::<_, CliError>(
                zeros
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
                    .collect(),
            )
        })
        .collect::<Result<_, _>>()?;
    Ok(per_mode.into_iter().flatten().collect())
}

pub fn eigen_rows(cfg: &RunConfig) -> Result<Vec<EigenRow>, CliError> {
    let Some([lo, hi]) = cfg.interval else {
        return Ok(Vec::new());
    };
    let p = profile(cfg)?;
    let conn = connection_options(cfg);
    let modes: Vec<u32> = (cfg.l_range[0]..=cfg.l_range[1]).collect();
    let per_mode: Vec<Vec<EigenRow>> = modes
        .par_iter()
        .map(|&l| {
            let found = eigenvalue_scan(&p, l, (lo, hi), EIGEN_SAMPLES, cfg.tolerances.zero_tol, &conn)?;
            Ok::<_, CliError>(found.into_iter().map(|lambda_e| EigenRow { l, lambda_e }).collect())
        })
        .collect::<Result<_, _>>()?;
    Ok(per_mode.into_iter().flatten().collect())
}

pub fn run_resonances(cfg: &RunConfig, out: &Path, svg: bool) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    if cfg.region.is_some() {
        let hits = resonance_hits(cfg)?;
        written.push(output::write_hits(&out.join("resonances.csv"), &hits)?);
        if svg {
            written.push(output::write_hits_svg(&out.join("resonances.svg"), &hits, None)?);
        }
    }
    if cfg.interval.is_some() {
        let rows = eigen_rows(cfg)?;
        let path = out.join("eigenvalues.csv");
        written.push(if rows.is_empty() {
            output::write_empty_csv(&path, &["l", "lambda_e"])?
        } else {
            output::write_csv(&path, &rows)?
        });
    }
    Ok(written)
}

/// Summary written next to the accumulation table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub n: u32,
    pub k: u32,
    pub amplitude: f64,
    pub accumulation_point: f64,
    pub regularized_at: Option<usize>,
    #[serde(flatten)]
    pub fit: FitSummary,
}

impl From<&AccumulationReport> for FitReport {
    fn from(r: &AccumulationReport) -> Self {
        FitReport {
            n: r.n,
            k: r.k,
            amplitude: r.amplitude,
            accumulation_point: r.accumulation_point,
            regularized_at: r.regularized_at,
            fit: r.fit.clone(),
        }
    }
}

pub fn accumulation_options(cfg: &RunConfig) -> AccumulationOptions {
    AccumulationOptions {
        l_min: cfg.l_range[0],
        l_max: cfg.l_range[1],
        fit_from: cfg.l_range[0].max(AccumulationOptions::default().fit_from),
        grid: cfg.region.as_ref().and_then(|r| r.grid).unwrap_or(16),
        connection: connection_options(cfg),
        ..AccumulationOptions::default()
    }
}

pub fn accumulate(cfg: &RunConfig) -> Result<AccumulationReport, CliError> {
    let p = profile(cfg)?;
    Ok(accumulation_experiment(&p, &accumulation_options(cfg))?)
}

pub fn write_accumulation(
    report: &AccumulationReport,
    out: &Path,
    stem: &str,
    svg: bool,
) -> Result<Vec<PathBuf>, CliError> {
    let mut written = vec![
        output::write_hits(&out.join(format!("{stem}.csv")), &report.hits)?,
        output::write_json(&out.join(format!("{stem}_fit.json")), &FitReport::from(report))?,
    ];
    if svg {
        written.push(output::write_hits_svg(
            &out.join(format!("{stem}.svg")),
            &report.hits,
            Some(report.accumulation_point),
        )?);
    }
    Ok(written)
}

pub fn run_accumulate(cfg: &RunConfig, out: &Path, svg: bool) -> Result<Vec<PathBuf>, CliError> {
    let report = accumulate(cfg)?;
    write_accumulation(&report, out, "accumulate", svg)
}
