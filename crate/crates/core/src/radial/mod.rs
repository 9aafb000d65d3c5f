//! Radial model: the mode equation of the warped ball
//! `g = x⁻² (dx² + d(x) h_{S^n})` on `0 < x < 2`,
//!
//! `-x²u'' + (n-1)xu' - (n/2)(d'/d)x²u' + (x²/d) v u - λ(n-λ) u = 0`,
//!
//! its Frobenius bases at the boundary `x = 0` and at the center `x = 2`, and
//! the connection coefficients `u_reg = A u_{n-λ} + B u_λ`.

mod connection;
mod frobenius;
pub mod integrate;
mod profile;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::real::Precision;

pub use connection::{a_coefficient, connection_coeffs, mode_scattering, AValue, ConnectionData, ConnectionOptions};
pub use frobenius::{
    boundary_residual, frobenius_boundary, frobenius_center, lattice_distance, lattice_residue, Branch, CenterSeries, FrobeniusSeries,
    SeriesValue,
};
pub use profile::{profile_eval, RadialProfile, KNOT_A, KNOT_B};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RadialError {
    #[error("x = {0} is outside (0, 2)")]
    DomainError(f64),
    #[error("indicial collision at m = {m}: |m(n-2σ-m)| = {distance:.3e}")]
    IndicialCollision { m: usize, distance: f64 },
    #[error("λ is within the lattice guard (m = {m}, distance {distance:.3e})")]
    LatticeGuard { m: usize, distance: f64 },
    #[error("integrator failure at x = {x}: {reason}")]
    IntegratorFailure { x: f64, reason: String },
    #[error("ill-conditioned: condition estimate {condition:.3e} at {precision:?} precision")]
    IllConditioned { condition: f64, precision: Precision },
    #[error("|A| = {relative:.3e} relative to the solution: λ is at a resonance")]
    AtResonance { relative: f64 },
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("invalid option: {0}")]
    InvalidOption(String),
}

/// One spherical-harmonic mode at spectral parameter λ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeParams {
    pub n: u32,
    pub l: u32,
    pub lambda: Complex64,
}

impl ModeParams {
    pub fn new(n: u32, l: u32, lambda: Complex64) -> Self {
        ModeParams { n, l, lambda }
    }

    /// Eigenvalue `l(l+n-1)` of the sphere Laplacian.
    pub fn v(&self) -> f64 {
        v_l(self.n, self.l)
    }

    /// `λ(n-λ)`.
    pub fn s(&self) -> Complex64 {
        self.lambda * (self.n as f64 - self.lambda)
    }

    /// `(1 + v)^(-1/2)`.
    pub fn alpha(&self) -> f64 {
        alpha_l(self.n, self.l)
    }

    pub fn with_lambda(&self, lambda: Complex64) -> Self {
        ModeParams { lambda, ..*self }
    }
}

pub fn v_l(n: u32, l: u32) -> f64 {
    let l = l as f64;
    l * (l + n as f64 - 1.0)
}

pub fn alpha_l(n: u32, l: u32) -> f64 {
    (1.0 + v_l(n, l)).powf(-0.5)
}

/// Distance of λ from the half-integer lattice `2λ - n ∈ ℤ`, measured as
/// `|λ - (n+j)/2|` for the nearest integer `j`.
pub fn half_lattice_distance(n: u32, lambda: Complex64) -> f64 {
    let j = (2.0 * lambda.re - n as f64).round();
    (lambda - Complex64::new((n as f64 + j) / 2.0, 0.0)).norm()
}
