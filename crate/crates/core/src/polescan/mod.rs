//! Zeros of `A_l(λ)` by the argument principle, and the accumulation
//! experiment for the odd perturbation of the ball.

mod scans;
mod winding;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::radial::RadialError;

pub use scans::{
    a_evaluator, accumulation_experiment, eigenvalue_scan, lambda0, m_k, regularization_in, AccumulationOptions,
    AccumulationReport, FitSummary, ResonanceHit,
};
pub use winding::{locate_zeros, winding_count, Zero};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolescanError {
    #[error("f vanishes on the contour near {at}")]
    ZeroOnContour { at: Complex64 },
    #[error("could not isolate zeros in [{lo}, {hi}] (winding {winding})")]
    Unresolved { lo: Complex64, hi: Complex64, winding: i64 },
    #[error("negative winding {winding}: the region contains poles")]
    PolesInside { winding: i64 },
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error(transparent)]
    Radial(#[from] RadialError),
}

/// Axis-aligned rectangle `[lo.re, hi.re] × [lo.im, hi.im]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRegion {
    pub lo: Complex64,
    pub hi: Complex64,
    /// Contour points per edge before adaptive refinement.
    pub grid: usize,
    /// Bound on both the quadtree depth and the phase bisection depth.
    pub depth: usize,
    /// Target accuracy of a zero.
    pub tol: f64,
}

impl ScanRegion {
    pub fn new(lo: Complex64, hi: Complex64) -> Result<Self, PolescanError> {
        let r = ScanRegion {
            lo,
            hi,
            grid: 16,
            depth: 40,
            tol: 1e-10,
        };
        r.validate()?;
        Ok(r)
    }

    /// Square of half-width `h` around `c`.
    pub fn centered(c: Complex64, h: f64) -> Self {
        ScanRegion {
            lo: c - Complex64::new(h, h),
            hi: c + Complex64::new(h, h),
            grid: 16,
            depth: 40,
            tol: 1e-10,
        }
    }

    pub fn with_grid(mut self, grid: usize) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_depth(mut self, depth: usize) -> Self {
        self.depth = depth;
        self
    }

    pub(crate) fn validate(&self) -> Result<(), PolescanError> {
        let ok = self.hi.re > self.lo.re && self.hi.im > self.lo.im && self.grid > 0 && self.tol > 0.0;
        if !ok || !(self.lo.norm().is_finite() && self.hi.norm().is_finite()) {
            return Err(PolescanError::InvalidRegion(format!("[{}, {}]", self.lo, self.hi)));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.hi.re - self.lo.re
    }

    pub fn height(&self) -> f64 {
        self.hi.im - self.lo.im
    }

    pub fn center(&self) -> Complex64 {
        (self.lo + self.hi) / 2.0
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.lo.re && z.re <= self.hi.re && z.im >= self.lo.im && z.im <= self.hi.im
    }

    fn grown(&self, frac: f64) -> ScanRegion {
        let pad = Complex64::new(frac * self.width(), frac * self.height());
        ScanRegion {
            lo: self.lo - pad,
            hi: self.hi + pad,
            ..self.clone()
        }
    }

    /// Counter-clockwise boundary points, `grid` per edge.
    fn contour_points(&self) -> Vec<Complex64> {
        let corners = [
            self.lo,
            Complex64::new(self.hi.re, self.lo.im),
            self.hi,
            Complex64::new(self.lo.re, self.hi.im),
        ];
        let mut pts = Vec::with_capacity(4 * self.grid);
        for e in 0..4 {
            let a = corners[e];
            let b = corners[(e + 1) % 4];
            for i in 0..self.grid {
                pts.push(a + (b - a) * (i as f64 / self.grid as f64));
            }
        }
        pts
    }

    /// Four children, cut at fraction `frac` of each side.
    fn split(&self, frac: f64) -> [ScanRegion; 4] {
        let mx = self.lo.re + frac * self.width();
        let my = self.lo.im + frac * self.height();
        let mk = |lo: Complex64, hi: Complex64| ScanRegion { lo, hi, ..self.clone() };
        [
            mk(self.lo, Complex64::new(mx, my)),
            mk(Complex64::new(mx, self.lo.im), Complex64::new(self.hi.re, my)),
            mk(Complex64::new(self.lo.re, my), Complex64::new(mx, self.hi.im)),
            mk(Complex64::new(mx, my), self.hi),
        ]
    }
}
