//! Jets of the boundary defining function change `t = e^ω x` for surfaces.
//!
//! On a circle boundary with `x²g = dx² + w(x,y) dy²` the function ω solves
//! `2ω_x + x(ω_x² + w⁻¹ ω_y²) = 0`, `ω(0,·) = ω₀`. Matching powers of `x`
//! gives `2(m+1) ω_{m+1} = -[ω_x² + w⁻¹ ω_y²]_{m-1}` and `ω₁ = 0`.
//! Products are formed on a grid of `4Q+1` points and projected back onto
//! Fourier modes `|q| ≤ Q`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormalFormError {
    #[error("w(0, y) is not positive on the sample grid (minimum {0})")]
    NonPositiveMetric(f64),
    #[error("Fourier data has {got} modes, expected {expected}")]
    Shape { expected: usize, got: usize },
}

/// `ω(x, y) = Σ_m Σ_{|q| ≤ Q} c[m][q] x^m e^{iqy}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierJet {
    order: usize,
    q_max: usize,
    /// `coeffs[m][q + Q]`.
    coeffs: Vec<Vec<Complex64>>,
}

impl FourierJet {
    pub fn zeros(order: usize, q_max: usize) -> Self {
        FourierJet {
            order,
            q_max,
            coeffs: vec![vec![Complex64::new(0.0, 0.0); 2 * q_max + 1]; order + 1],
        }
    }

    /// Builds a jet from per-order mode vectors of length `2Q+1`.
    pub fn from_modes(q_max: usize, modes: Vec<Vec<Complex64>>) -> Result<Self, NormalFormError> {
        let width = 2 * q_max + 1;
        if let Some(bad) = modes.iter().find(|m| m.len() != width) {
            return Err(NormalFormError::Shape { expected: width, got: bad.len() });
        }
        let order = modes.len().saturating_sub(1);
        let mut jet = FourierJet::zeros(order, q_max);
        for (m, row) in modes.into_iter().enumerate() {
            jet.coeffs[m] = row;
        }
        Ok(jet)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn q_max(&self) -> usize {
        self.q_max
    }

    /// Zero outside the stored range.
    pub fn get(&self, m: usize, q: i64) -> Complex64 {
        let q_max = self.q_max as i64;
        if m > self.order || q.abs() > q_max {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[m][(q + q_max) as usize]
    }

    pub fn set(&mut self, m: usize, q: i64, v: Complex64) {
        let idx = (q + self.q_max as i64) as usize;
        self.coeffs[m][idx] = v;
    }

    pub fn modes(&self, m: usize) -> &[Complex64] {
        &self.coeffs[m]
    }

    /// `ω_m(y)`.
    pub fn eval(&self, m: usize, y: f64) -> Complex64 {
        if m > self.order {
            return Complex64::new(0.0, 0.0);
        }
        self.modes_iter(m).map(|(q, c)| c * Complex64::from_polar(1.0, q as f64 * y)).sum()
    }

    /// `∂_y ω_m(y)`.
    pub fn eval_dy(&self, m: usize, y: f64) -> Complex64 {
        if m > self.order {
            return Complex64::new(0.0, 0.0);
        }
        self.modes_iter(m)
            .map(|(q, c)| c * Complex64::new(0.0, q as f64) * Complex64::from_polar(1.0, q as f64 * y))
            .sum()
    }

    fn modes_iter(&self, m: usize) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let q_max = self.q_max as i64;
        self.coeffs[m].iter().enumerate().map(move |(i, &c)| (i as i64 - q_max, c))
    }

    /// Largest Fourier modulus at order `m`.
    pub fn max_modulus(&self, m: usize) -> f64 {
        self.coeffs[m].iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest deviation from `c(m,-q) = conj c(m,q)`.
    pub fn reality_defect(&self) -> f64 {
        let q_max = self.q_max as i64;
        let mut worst: f64 = 0.0;
        for m in 0..=self.order {
            for q in 0..=q_max {
                worst = worst.max((self.get(m, -q) - self.get(m, q).conj()).norm());
            }
        }
        worst
    }
}

fn grid(q_max: usize) -> Vec<f64> {
    let n = 4 * q_max + 1;
    (0..n).map(|s| TAU * s as f64 / n as f64).collect()
}

/// Projects grid samples onto modes `|q| ≤ Q`.
fn project(samples: &[Complex64], q_max: usize) -> Vec<Complex64> {
    let n = samples.len() as f64;
    let ys = grid(q_max);
    (-(q_max as i64)..=q_max as i64)
        .map(|q| {
            samples
                .iter()
                .zip(&ys)
                .map(|(f, &y)| f * Complex64::from_polar(1.0, -(q as f64) * y))
                .sum::<Complex64>()
                / n
        })
        .collect()
}

/// Samples `ω_j` and `∂_y ω_j` on the grid for `j ≤ upto`.
struct GridJet {
    val: Vec<Vec<Complex64>>,
    dy: Vec<Vec<Complex64>>,
}

/// Pointwise `1 / w(x, y_s)` as an `x`-series at each grid point.
fn reciprocal_on_grid(w: &FourierJet, order: usize) -> Result<Vec<Vec<Complex64>>, NormalFormError> {
    let ys = grid(w.q_max);
    let mut min_w0 = f64::INFINITY;
    let out = ys
        .iter()
        .map(|&y| {
            let ws: Vec<Complex64> = (0..=order).map(|m| w.eval(m, y)).collect();
            min_w0 = min_w0.min(ws[0].re);
            let mut inv = Vec::with_capacity(order + 1);
            inv.push(1.0 / ws[0]);
            for i in 1..=order {
                let acc: Complex64 = (1..=i).map(|j| ws[j] * inv[i - j]).sum();
                inv.push(-acc * inv[0]);
            }
            inv
        })
        .collect();
    if !(min_w0 > 0.0) {
        return Err(NormalFormError::NonPositiveMetric(min_w0));
    }
    Ok(out)
}

/// `[ω_x² + w⁻¹ ω_y²]_{m}` on the grid from the jets already known.
fn nonlinear_coeff(g: &GridJet, winv: &[Vec<Complex64>], m: usize, s: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    // (ω_x)_a = (a+1) ω_{a+1}
    for a in 0..=m {
        let b = m - a;
        if a + 1 < g.val.len() && b + 1 < g.val.len() {
            acc += ((a + 1) * (b + 1)) as f64 * g.val[a + 1][s] * g.val[b + 1][s];
        }
    }
    for a in 0..=m {
        for b in 0..=m - a {
            let c = m - a - b;
            if b < g.dy.len() && c < g.dy.len() {
                acc += winv[s][a] * g.dy[b][s] * g.dy[c][s];
            }
        }
    }
    acc
}

/// Solves for `ω_0 … ω_M` given the jet of `w` and the boundary value ω₀.
///
/// `wjet` and `omega0` must share `Q`; `wjet` is read through order `M`.
pub fn omega_jet(wjet: &FourierJet, omega0: &[Complex64], order: usize) -> Result<FourierJet, NormalFormError> {
    let q_max = wjet.q_max;
    if omega0.len() != 2 * q_max + 1 {
        return Err(NormalFormError::Shape { expected: 2 * q_max + 1, got: omega0.len() });
    }
    let winv = reciprocal_on_grid(wjet, order)?;
    let ys = grid(q_max);
    let mut out = FourierJet::zeros(order, q_max);
    out.coeffs[0] = omega0.to_vec();
    let sample = |jet: &FourierJet, m: usize| -> (Vec<Complex64>, Vec<Complex64>) {
        (ys.iter().map(|&y| jet.eval(m, y)).collect(), ys.iter().map(|&y| jet.eval_dy(m, y)).collect())
    };
    let (v0, d0) = sample(&out, 0);
    let mut g = GridJet { val: vec![v0], dy: vec![d0] };
    // ω₁ = 0
    g.val.push(vec![Complex64::new(0.0, 0.0); ys.len()]);
    g.dy.push(vec![Complex64::new(0.0, 0.0); ys.len()]);
    for m in 1..order {
        let samples: Vec<Complex64> = (0..ys.len()).map(|s| nonlinear_coeff(&g, &winv, m - 1, s)).collect();
        let scale = -1.0 / (2.0 * (m + 1) as f64);
        let modes: Vec<Complex64> = project(&samples, q_max).into_iter().map(|c| c * scale).collect();
        out.coeffs[m + 1] = modes;
        let (v, d) = sample(&out, m + 1);
        g.val.push(v);
        g.dy.push(d);
    }
    Ok(out)
}

/// Largest grid value of the projected residual of the jet equation over
/// orders `x^0 … x^{M-1}`.
pub fn residual(wjet: &FourierJet, omega: &FourierJet) -> Result<f64, NormalFormError> {
    let order = omega.order;
    let q_max = omega.q_max;
    let winv = reciprocal_on_grid(wjet, order)?;
    let ys = grid(q_max);
    let g = GridJet {
        val: (0..=order).map(|m| ys.iter().map(|&y| omega.eval(m, y)).collect()).collect(),
        dy: (0..=order).map(|m| ys.iter().map(|&y| omega.eval_dy(m, y)).collect()).collect(),
    };
    let mut worst: f64 = 0.0;
    for m in 0..order {
        // [2ω_x]_m + [x(...)]_m
        let samples: Vec<Complex64> = (0..ys.len())
            .map(|s| {
                let lin = 2.0 * (m + 1) as f64 * g.val[m + 1][s];
                let nl = if m >= 1 { nonlinear_coeff(&g, &winv, m - 1, s) } else { Complex64::new(0.0, 0.0) };
                lin + nl
            })
            .collect();
        let modes = project(&samples, q_max);
        for &y in &ys {
            let v: Complex64 = modes
                .iter()
                .enumerate()
                .map(|(i, c)| c * Complex64::from_polar(1.0, (i as f64 - q_max as f64) * y))
                .sum();
            worst = worst.max(v.norm());
        }
    }
    Ok(worst)
}
