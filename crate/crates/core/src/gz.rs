//! Formal boundary solution of `(Δ_g - λ(n-λ)) x^(n-λ) F = O(x^∞)` for warped
//! metrics `g = x^-2 (dx² + w(x) h₀)`, and the residues of its coefficients.

use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ring::{int, laurent_coeff, BoundaryOp, Coeff, Poly, RatFunc, Rational, RingError, XSeries};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GzError {
    #[error("w(0) must be 1, got {0}")]
    NotNormalized(String),
    #[error("boundary dimension must be at least 1")]
    BadDimension,
    #[error("truncation order must be at least {needed}, got {got}")]
    OrderTooLow { needed: usize, got: usize },
    #[error("metric is only even modulo O(x^{}), residues up to k = {requested} need O(x^{})", 2 * .found + 1, 2 * .requested + 1)]
    NotEvenEnough { found: usize, requested: usize },
    #[error("p_{j} has L-degree {degree} above the bound {bound}")]
    DegreeBound { j: usize, degree: usize, bound: usize },
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Jet of `x² g = dx² + w(x) h₀` at the boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct WarpedMetricJet {
    n: u32,
    w: XSeries<Rational>,
}

impl WarpedMetricJet {
    pub fn new(n: u32, w: XSeries<Rational>) -> Result<Self, GzError> {
        if n == 0 {
            return Err(GzError::BadDimension);
        }
        if !w.coeff(0).is_one() {
            return Err(GzError::NotNormalized(w.coeff(0).to_string()));
        }
        Ok(WarpedMetricJet { n, w })
    }

    /// From the coefficient list `[w₀, w₁, …]`, truncated at `order`.
    pub fn from_coeffs(n: u32, coeffs: Vec<Rational>, order: usize) -> Result<Self, GzError> {
        WarpedMetricJet::new(n, XSeries::new(coeffs, order))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn w(&self) -> &XSeries<Rational> {
        &self.w
    }

    pub fn order(&self) -> usize {
        self.w.order()
    }
}

/// `n w'/w`, known through order `M - 1`.
pub fn trace_term(m: &WarpedMetricJet) -> XSeries<Rational> {
    if m.order() == 0 {
        return XSeries::zero(0);
    }
    let winv = m.w.reciprocal().expect("w(0) = 1 is invertible");
    m.w.derivative().mul(&winv).scale(&int(m.n as i64))
}

fn w_inverse(m: &WarpedMetricJet) -> XSeries<Rational> {
    m.w.reciprocal().expect("w(0) = 1 is invertible")
}

fn n_minus_lambda(n: u32) -> RatFunc {
    RatFunc::from_poly(Poly::new(vec![int(n as i64), int(-1)]))
}

/// `j(2λ - n - j)`.
fn indicial(j: usize, n: u32) -> RatFunc {
    let j = j as i64;
    RatFunc::from_poly(Poly::new(vec![int(-j * (n as i64 + j)), int(2 * j)]))
}

/// The parts of `[x^j] 𝒟_λ F` that only involve `F_0 … F_{j-1}`.
fn lower_part(f: &XSeries<BoundaryOp>, t: &XSeries<Rational>, winv: &XSeries<Rational>, n: u32, j: usize) -> BoundaryOp {
    let nl = n_minus_lambda(n);
    let mut acc = BoundaryOp::zero();
    // -(1/2) Σ_{a+b=j-1} T_a (b + n - λ) F_b
    for b in 0..j {
        let a = j - 1 - b;
        if a > t.order() || b > f.order() || t.coeff(a).is_zero() || f.coeff(b).is_zero() {
            continue;
        }
        let factor = &nl + &RatFunc::constant(int(b as i64));
        let factor = factor.scale(&(t.coeff(a) * Rational::new((-1).into(), 2.into())));
        acc = &acc + &f.coeff(b).scale(&factor);
    }
    // L Σ_{a+b=j-2} (w⁻¹)_a F_b
    if j >= 2 {
        let mut inner = BoundaryOp::zero();
        for b in 0..=j - 2 {
            let a = j - 2 - b;
            if a > winv.order() || b > f.order() || winv.coeff(a).is_zero() {
                continue;
            }
            inner = &inner + &f.coeff(b).scale_rational(winv.coeff(a));
        }
        acc = &acc + &inner.mul_l();
    }
    acc
}

/// `𝒟_λ F` term by term, known through `min(order(F), M)`.
///
/// With `T = n w'/w`,
/// `𝒟_λ = -x²∂² + (2λ-n-1 - xT/2) x∂ - (n-λ)xT/2 + x² w⁻¹ L`.
pub fn apply_d_lambda(f: &XSeries<BoundaryOp>, m: &WarpedMetricJet) -> XSeries<BoundaryOp> {
    let order = f.order().min(m.order());
    let t = trace_term(m);
    let winv = w_inverse(m);
    let out = (0..=order)
        .map(|j| {
            let diag = f.coeff(j).scale(&indicial(j, m.n));
            &diag + &lower_part(f, &t, &winv, m.n, j)
        })
        .collect();
    XSeries::new(out, order)
}

/// Coefficients `p_{j,λ}` with `f_j = p_{j,λ} f₀`, and the formal series `F`.
#[derive(Clone, Debug, PartialEq)]
pub struct GzSolution {
    pub p: Vec<BoundaryOp>,
    pub f: XSeries<BoundaryOp>,
    /// `n w_{2k+1}` for the first odd coefficient, if any.
    pub k_trace: Option<Rational>,
}

pub fn gz_solve(m: &WarpedMetricJet) -> Result<GzSolution, GzError> {
    let order = m.order();
    if order < 1 {
        return Err(GzError::OrderTooLow { needed: 1, got: order });
    }
    let t = trace_term(m);
    let winv = w_inverse(m);
    let bound = order.div_ceil(2);
    let mut f = XSeries::<BoundaryOp>::one(order);
    let mut p = vec![BoundaryOp::identity()];
    for j in 1..=order {
        let rhs = lower_part(&f, &t, &winv, m.n, j);
        let pj = rhs.scale(&(&RatFunc::constant(int(-1)) / &indicial(j, m.n)));
        if let Some(d) = pj.degree() {
            if d > bound {
                return Err(GzError::DegreeBound { j, degree: d, bound });
            }
        }
        f.set_coeff(j, pj.clone());
        p.push(pj);
    }
    let k_trace = match evenness_order(&m.w) {
        Evenness::Finite(k) => Some(m.w.coeff(2 * k + 1) * int(m.n as i64)),
        Evenness::Infinite(_) => None,
    };
    Ok(GzSolution { p, f, k_trace })
}

/// How far a jet is even: `Finite(k)` means even modulo `O(x^(2k+1))` but not
/// modulo `O(x^(2k+3))`; `Infinite(M)` means no odd term through order `M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Evenness {
    Finite(usize),
    Infinite(usize),
}

impl Evenness {
    /// Whether the jet is even modulo `O(x^(2k+1))`.
    pub fn at_least(self, k: usize) -> bool {
        match self {
            Evenness::Finite(e) => e >= k,
            Evenness::Infinite(_) => true,
        }
    }
}

pub fn evenness_order(w: &XSeries<Rational>) -> Evenness {
    (1..=w.order())
        .step_by(2)
        .find(|&i| !w.coeff(i).is_zero())
        .map(|i| Evenness::Finite((i - 1) / 2))
        .unwrap_or(Evenness::Infinite(w.order()))
}

/// `(n+1)/2 + l`.
pub fn lambda_l(n: u32, l: usize) -> Rational {
    Rational::new((n as i64 + 1 + 2 * l as i64).into(), 2.into())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidueEntry {
    pub l: usize,
    pub lambda_l: String,
    /// Coefficients of `L^0, L^1, …` in `p_{2l+1} = Res_{λ_l} p_{2l+1,λ}`.
    pub op_coefficients: Vec<String>,
    /// `Res_{λ_l} S` is `Π_{λ_l} - p_{2l+1}`; only the second term is computed.
    pub differential_part: String,
    pub eigenprojection: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidueChecks {
    pub lower_residues_vanish: bool,
    pub leading_residue_expected: String,
    pub leading_residue_matches: bool,
    pub symbol_coefficient: String,
    pub symbol_coefficient_expected: String,
    pub symbol_matches: bool,
    pub symbol_vanishes: bool,
    pub vanishing_condition_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidueReport {
    pub n: u32,
    pub k: usize,
    pub evenness: Evenness,
    pub residues: Vec<ResidueEntry>,
    pub checks: ResidueChecks,
}

/// Exact residues `p_{2l+1}` for `l = 0 … k+1` with the identities expected
/// for a metric even modulo `O(x^(2k+1))` and `w_{2k+1} = c`.
pub fn scattering_residues(m: &WarpedMetricJet, k: usize) -> Result<ResidueReport, GzError> {
    let ev = evenness_order(&m.w);
    if !ev.at_least(k) {
        let Evenness::Finite(found) = ev else { unreachable!() };
        return Err(GzError::NotEvenEnough { found, requested: k });
    }
    let needed = 2 * k + 3;
    if m.order() < needed {
        return Err(GzError::OrderTooLow { needed, got: m.order() });
    }
    let sol = gz_solve(m)?;
    let n = m.n;
    let residue_op = |l: usize| -> BoundaryOp {
        let ll = lambda_l(n, l);
        sol.p[2 * l + 1].map_coeffs(|c| RatFunc::constant(laurent_coeff(c, &ll, 1)))
    };
    let ops: Vec<BoundaryOp> = (0..=k + 1).map(residue_op).collect();
    let residues = ops
        .iter()
        .enumerate()
        .map(|(l, op)| ResidueEntry {
            l,
            lambda_l: lambda_l(n, l).to_string(),
            op_coefficients: op.coeffs().iter().map(|c| constant_of(c).to_string()).collect(),
            differential_part: format!("-({op})"),
            eigenprojection: "not computed".into(),
        })
        .collect();

    let c = m.w.coeff(2 * k + 1).clone();
    let nr = int(n as i64);
    let lk = lambda_l(n, k);
    let n_minus_lk = &nr - &lk;
    let lower_residues_vanish = ops[..k].iter().all(BoundaryOp::is_zero);
    let leading_expected = &n_minus_lk * &nr * &c / int(4);
    let leading = &ops[k];
    let leading_residue_matches = *leading == BoundaryOp::from_rational(&leading_expected);
    let symbol = constant_of(&ops[k + 1].coeff(1));
    let nn = &nr * &n_minus_lk;
    let symbol_expected = -(&c * (&nn - int(2))) / int(4 * (2 * k as i64 + 3));
    let checks = ResidueChecks {
        lower_residues_vanish,
        leading_residue_expected: leading_expected.to_string(),
        leading_residue_matches,
        symbol_coefficient: symbol.to_string(),
        symbol_coefficient_expected: symbol_expected.to_string(),
        symbol_matches: symbol == symbol_expected,
        symbol_vanishes: symbol.is_zero(),
        vanishing_condition_holds: c.is_zero() || nn == int(2),
    };
    Ok(ResidueReport {
        n,
        k,
        evenness: ev,
        residues,
        checks,
    })
}

fn constant_of(c: &RatFunc) -> Rational {
    c.as_constant().expect("residues are constants")
}
