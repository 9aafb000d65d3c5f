use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{PolescanError, ScanRegion};
use crate::radial::RadialError;

/// A zero found by [`locate_zeros`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Zero {
    pub lambda: Complex64,
    pub winding: i64,
    /// Length of the last secant step, an estimate of `|f/f'|` at the zero.
    pub newton_residual: f64,
    pub simple: bool,
}

/// Phase change of `f` from `za` to `zb`, bisecting while a single step
/// turns by more than a quarter turn.
fn segment_phase<F>(f: &F, za: Complex64, fa: Complex64, zb: Complex64, fb: Complex64, depth: usize) -> Result<f64, PolescanError>
where
    F: Fn(Complex64) -> Result<Complex64, RadialError> + Sync,
{
    if fa.norm() == 0.0 || !fa.norm().is_finite() {
        return Err(PolescanError::ZeroOnContour { at: za });
    }
    if fb.norm() == 0.0 || !fb.norm().is_finite() {
        return Err(PolescanError::ZeroOnContour { at: zb });
    }
    let d = (fb / fa).arg();
    if d.abs() <= PI / 2.0 {
        return Ok(d);
    }
    if depth == 0 {
        return Err(PolescanError::ZeroOnContour { at: (za + zb) / 2.0 });
    }
    let zm = (za + zb) / 2.0;
    let fm = f(zm)?;
    Ok(segment_phase(f, za, fa, zm, fm, depth - 1)? + segment_phase(f, zm, fm, zb, fb, depth - 1)?)
}

/// Number of zeros minus poles of `f` inside `region`, from the accumulated
/// phase along its boundary.
pub fn winding_count<F>(f: &F, region: &ScanRegion) -> Result<i64, PolescanError>
where
    F: Fn(Complex64) -> Result<Complex64, RadialError> + Sync,
{
    region.validate()?;
    let pts = region.contour_points();
    let vals: Vec<Complex64> = pts.par_iter().map(|&z| f(z)).collect::<Result<_, _>>()?;
    let mut total = 0.0;
    for i in 0..pts.len() {
        let j = (i + 1) % pts.len();
        total += segment_phase(f, pts[i], vals[i], pts[j], vals[j], region.depth)?;
    }
    let turns = total / (2.0 * PI);
    let w = turns.round();
    if (turns - w).abs() > 0.25 {
        return Err(PolescanError::ZeroOnContour { at: region.center() });
    }
    Ok(w as i64)
}

/// Secant iteration from the box center; `None` if it leaves the box or
/// stalls.
fn secant<F>(f: &F, region: &ScanRegion) -> Result<Option<(Complex64, f64)>, PolescanError>
where
    F: Fn(Complex64) -> Result<Complex64, RadialError> + Sync,
{
    let size = region.width().max(region.height());
    let mut z0 = region.center();
    let mut z1 = z0 + Complex64::new(0.05, 0.031) * size;
    let mut f0 = f(z0)?;
    let mut f1 = f(z1)?;
    let grown = region.grown(0.1);
    for _ in 0..80 {
        let df = f1 - f0;
        if df.norm() == 0.0 {
            return Ok(if f1.norm() == 0.0 { Some((z1, 0.0)) } else { None });
        }
        let step = f1 * (z1 - z0) / df;
        let z2 = z1 - step;
        if !grown.contains(z2) || !z2.norm().is_finite() {
            return Ok(None);
        }
        let len = step.norm();
        z0 = z1;
        f0 = f1;
        z1 = z2;
        if len <= 0.1 * region.tol {
            return Ok(Some((z1, len)));
        }
        f1 = f(z1)?;
        if f1.norm() == 0.0 {
            return Ok(Some((z1, 0.0)));
        }
    }
    Ok(None)
}

const SPLITS: [f64; 3] = [0.5173, 0.4589, 0.5431];

fn solve<F>(f: &F, region: &ScanRegion, w: i64, level: usize, out: &mut Vec<Zero>) -> Result<(), PolescanError>
where
    F: Fn(Complex64) -> Result<Complex64, RadialError> + Sync,
{
    if w == 0 {
        return Ok(());
    }
    if w < 0 {
        return Err(PolescanError::PolesInside { winding: w });
    }
    let size = region.width().max(region.height());
    if w == 1 {
        if let Some((z, res)) = secant(f, region)? {
            let check = ScanRegion::centered(z, 5.0 * region.tol).with_grid(4).with_tol(region.tol);
            if let Ok(1) = winding_count(f, &check) {
                out.push(Zero {
                    lambda: z,
                    winding: 1,
                    newton_residual: res,
                    simple: true,
                });
                return Ok(());
            }
        }
    } else if size <= 100.0 * region.tol {
        out.push(Zero {
            lambda: region.center(),
            winding: w,
            newton_residual: size,
            simple: false,
        });
        return Ok(());
    }
    if level == 0 || size <= region.tol {
        return Err(PolescanError::Unresolved {
            lo: region.lo,
            hi: region.hi,
            winding: w,
        });
    }
    let mut last_err = None;
    for &frac in &SPLITS {
        let children = region.split(frac);
        let counts: Result<Vec<i64>, _> = children.iter().map(|c| winding_count(f, c)).collect();
        match counts {
            Ok(counts) if counts.iter().sum::<i64>() == w => {
                for (c, cw) in children.iter().zip(counts) {
                    solve(f, c, cw, level - 1, out)?;
                }
                return Ok(());
            }
            Ok(counts) => {
                last_err = Some(PolescanError::Unresolved {
                    lo: region.lo,
                    hi: region.hi,
                    winding: counts.iter().sum(),
                })
            }
            Err(e @ PolescanError::ZeroOnContour { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("at least one split attempted"))
}

/// All zeros of `f` inside `region`, by quadtree subdivision down to boxes
/// of winding one, secant refinement and re-validation in a box of side
/// `10 tol`. Clusters that stay together below `100 tol` are reported once
/// with their total winding and `simple = false`.
pub fn locate_zeros<F>(f: &F, region: &ScanRegion) -> Result<Vec<Zero>, PolescanError>
where
    F: Fn(Complex64) -> Result<Complex64, RadialError> + Sync,
{
    let w = winding_count(f, region)?;
    let mut out = Vec::new();
    solve(f, region, w, region.depth, &mut out)?;
    out.sort_by(|a, b| {
        a.lambda
            .re
            .partial_cmp(&b.lambda.re)
            .unwrap()
            .then(a.lambda.im.partial_cmp(&b.lambda.im).unwrap())
    });
    Ok(out)
}
