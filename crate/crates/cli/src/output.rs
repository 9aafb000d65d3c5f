use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ahscatter::polescan::ResonanceHit;
use ahscatter::radial::{v_l, ConnectionData};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeRow {
    pub l: u32,
    pub v_l: f64,
    pub re_lambda: f64,
    pub im_lambda: f64,
    #[serde(rename = "re_A")]
    pub re_a: f64,
    #[serde(rename = "im_A")]
    pub im_a: f64,
    #[serde(rename = "re_B")]
    pub re_b: f64,
    #[serde(rename = "im_B")]
    pub im_b: f64,
    #[serde(rename = "re_S")]
    pub re_s: f64,
    #[serde(rename = "im_S")]
    pub im_s: f64,
    pub wronskian_defect: Option<f64>,
    pub precision_used: String,
    pub condition_estimate: f64,
}

impl ModeRow {
    pub fn new(n: u32, l: u32, d: &ConnectionData) -> Self {
        ModeRow {
            l,
            v_l: v_l(n, l),
            re_lambda: d.lambda.re,
            im_lambda: d.lambda.im,
            re_a: d.a.re,
            im_a: d.a.im,
            re_b: d.b.re,
            im_b: d.b.im,
            re_s: d.s.re,
            im_s: d.s.im,
            wronskian_defect: d.wronskian_defect,
            precision_used: d.precision_used.as_str().to_string(),
            condition_estimate: d.condition_estimate,
        }
    }
}

/// One zero; `predicted` and `ratio` are blank when no prediction applies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HitRow {
    pub l: u32,
    pub v_l: f64,
    pub alpha_l: f64,
    pub re_zero: f64,
    pub im_zero: f64,
    pub winding: i64,
    pub predicted_re: Option<f64>,
    pub predicted_im: Option<f64>,
    pub ratio_re: Option<f64>,
    pub ratio_im: Option<f64>,
    pub newton_residual: f64,
}

impl From<&ResonanceHit> for HitRow {
    fn from(h: &ResonanceHit) -> Self {
        let finite = |z: Complex64| z.re.is_finite() && z.im.is_finite();
        let pred = finite(h.predicted).then_some(h.predicted);
        let ratio = finite(h.ratio).then_some(h.ratio);
        HitRow {
            l: h.l,
            v_l: h.v_l,
            alpha_l: h.alpha_l,
            re_zero: h.zero.re,
            im_zero: h.zero.im,
            winding: h.winding,
            predicted_re: pred.map(|z| z.re),
            predicted_im: pred.map(|z| z.im),
            ratio_re: ratio.map(|z| z.re),
            ratio_im: ratio.map(|z| z.im),
            newton_residual: h.newton_residual,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenRow {
    pub l: u32,
    pub lambda_e: f64,
}

pub fn write_csv<R: Serialize>(path: &Path, rows: &[R]) -> Result<PathBuf, CliError> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(path.to_path_buf())
}

/// Writes a table that has only a header row.
pub fn write_empty_csv(path: &Path, header: &[&str]) -> Result<PathBuf, CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    w.flush()?;
    Ok(path.to_path_buf())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<PathBuf, CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(path.to_path_buf())
}

pub const HIT_HEADER: [&str; 11] = [
    "l",
    "v_l",
    "alpha_l",
    "re_zero",
    "im_zero",
    "winding",
    "predicted_re",
    "predicted_im",
    "ratio_re",
    "ratio_im",
    "newton_residual",
];

pub fn write_hits(path: &Path, hits: &[ResonanceHit]) -> Result<PathBuf, CliError> {
    if hits.is_empty() {
        return write_empty_csv(path, &HIT_HEADER);
    }
    let rows: Vec<HitRow> = hits.iter().map(HitRow::from).collect();
    write_csv(path, &rows)
}

/// Scatter of zeros (filled) and predictions (hollow) in the λ-plane,
/// with the accumulation point marked when given.
pub fn scatter_svg(zeros: &[Complex64], predicted: &[Complex64], mark: Option<f64>) -> String {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const PAD: f64 = 48.0;
    let all: Vec<Complex64> = zeros
        .iter()
        .chain(predicted)
        .copied()
        .chain(mark.map(|m| Complex64::new(m, 0.0)))
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = all.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), z| (a.min(z.re), b.max(z.re), c.min(z.im), d.max(z.im)),
    );
    if all.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, -0.5, 0.5);
    }
    let span = |lo: &mut f64, hi: &mut f64| {
        let w = (*hi - *lo).max(1e-12 * (lo.abs() + hi.abs()).max(1.0));
        let c = 0.5 * (*lo + *hi);
        *lo = c - 0.55 * w;
        *hi = c + 0.55 * w;
    };
    span(&mut x0, &mut x1);
    span(&mut y0, &mut y1);
    let px = |z: Complex64| {
        (
            PAD + (z.re - x0) / (x1 - x0) * (W - 2.0 * PAD),
            H - PAD - (z.im - y0) / (y1 - y0) * (H - 2.0 * PAD),
        )
    };
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    if y0 < 0.0 && y1 > 0.0 {
        let (_, yy) = px(Complex64::new(x0, 0.0));
        let _ = writeln!(s, r##"<line x1="{PAD}" y1="{yy:.2}" x2="{}" y2="{yy:.2}" stroke="#999"/>"##, W - PAD);
    }
    if let Some(m) = mark {
        let (mx, my) = px(Complex64::new(m, 0.0));
        let _ = writeln!(s, r#"<path d="M{:.2} {:.2}l8 8m0 -8l-8 8" stroke="red"/>"#, mx - 4.0, my - 4.0);
    }
    for &z in predicted {
        let (x, y) = px(z);
        let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="none" stroke="steelblue"/>"#);
    }
    for &z in zeros {
        let (x, y) = px(z);
        let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="black"/>"#);
    }
    let _ = writeln!(s, r#"<text x="{PAD}" y="{}" font-size="12">Re λ ∈ [{x0:.6}, {x1:.6}]</text>"#, H - 16.0);
    let _ = writeln!(s, r#"<text x="{PAD}" y="20" font-size="12">Im λ ∈ [{y0:.3e}, {y1:.3e}]</text>"#);
    s.push_str("</svg>\n");
    s
}

pub fn write_hits_svg(path: &Path, hits: &[ResonanceHit], mark: Option<f64>) -> Result<PathBuf, CliError> {
    let zeros: Vec<Complex64> = hits.iter().map(|h| h.zero).collect();
    let pred: Vec<Complex64> = hits
        .iter()
        .map(|h| h.predicted)
        .filter(|z| z.re.is_finite() && z.im.is_finite())
        .collect();
    std::fs::write(path, scatter_svg(&zeros, &pred, mark))?;
    Ok(path.to_path_buf())
}
