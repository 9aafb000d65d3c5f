use std::fmt;
use std::path::Path;

use ahscatter::real::Precision;
use ahscatter::ring::{parse_rational, rational_to_f64, Rational};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::CliError;

/// A rational written as `"p/q"` (or a JSON integer) in configs.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalValue(pub Rational);

impl RationalValue {
    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.0)
    }
}

impl Serialize for RationalValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for RationalValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = RationalValue;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational string \"p/q\" or an integer")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<RationalValue, E> {
                parse_rational(v).map(RationalValue).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<RationalValue, E> {
                Ok(RationalValue(Rational::from_integer(v.into())))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<RationalValue, E> {
                Ok(RationalValue(Rational::from_integer(v.into())))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<RationalValue, E> {
                Err(E::custom(format!("floating point value {v} where a rational string is required")))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub ode_rtol: f64,
    pub zero_tol: f64,
    pub lattice_guard: f64,
    pub wronskian_tol: f64,
    /// Escalation threshold on `condition · ε`.
    pub condition_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            ode_rtol: 1e-12,
            zero_tol: 1e-10,
            lattice_guard: 1e-3,
            wronskian_tol: 1e-10,
            condition_tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
    #[serde(default)]
    pub grid: Option<usize>,
}

/// One Fourier entry `c[m][q] = re + i im`; the entry at `-q` is filled in
/// by conjugation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierEntry {
    #[serde(default)]
    pub m: usize,
    pub q: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormalFormConfig {
    pub q_max: usize,
    pub order: usize,
    pub w: Vec<FourierEntry>,
    pub omega0: Vec<FourierEntry>,
}

impl Default for NormalFormConfig {
    fn default() -> Self {
        NormalFormConfig {
            q_max: 8,
            order: 10,
            w: vec![FourierEntry {
                m: 0,
                q: 0,
                re: 1.0,
                im: 0.0,
            }],
            omega0: vec![FourierEntry {
                m: 0,
                q: 1,
                re: 0.5,
                im: 0.0,
            }],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Gz,
    Normalform,
    Modes,
    Resonances,
    Accumulate,
    Verify,
}

impl Engine {
    pub fn as_str(self) -> &'static str {
        match self {
            Engine::Gz => "gz",
            Engine::Normalform => "normalform",
            Engine::Modes => "modes",
            Engine::Resonances => "resonances",
            Engine::Accumulate => "accumulate",
            Engine::Verify => "verify",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub engine: Option<Engine>,
    pub n: u32,
    pub k: u32,
    /// Amplitude of the odd perturbation `c x^(2k+1)`.
    pub c: RationalValue,
    /// Warping jet `w_0, w_1, …` for `gz`.
    pub w: Option<Vec<RationalValue>>,
    #[serde(alias = "M")]
    pub order: Option<usize>,
    pub l_range: [u32; 2],
    pub lambdas: Vec<[f64; 2]>,
    pub region: Option<RegionConfig>,
    /// Real interval for the eigenvalue scan.
    pub interval: Option<[f64; 2]>,
    pub tolerances: Tolerances,
    pub precision: Precision,
    pub x0: f64,
    pub delta: f64,
    pub seed: u64,
    pub normalform: NormalFormConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            engine: None,
            n: 2,
            k: 0,
            c: RationalValue(Rational::from_integer(1.into())),
            w: None,
            order: None,
            l_range: [5, 40],
            lambdas: vec![[1.0, 1.0]],
            region: None,
            interval: None,
            tolerances: Tolerances::default(),
            precision: Precision::Double,
            x0: 0.2,
            delta: 1e-3,
            seed: 20_240_601,
            normalform: NormalFormConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Checks that do not depend on the engine, plus the ones that do.
    pub fn validate(&self, engine: Engine) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if let Some(e) = self.engine {
            if e != engine {
                return bad(format!("config is for `{}` but `{}` was requested", e.as_str(), engine.as_str()));
            }
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("ode_rtol", t.ode_rtol),
            ("zero_tol", t.zero_tol),
            ("lattice_guard", t.lattice_guard),
            ("wronskian_tol", t.wronskian_tol),
            ("condition_tol", t.condition_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("tolerance {name} must be positive, got {v}"));
            }
        }
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.c.0 < Rational::from_integer(0.into()) {
            return bad("the perturbation amplitude c must be nonnegative".into());
        }
        if self.l_range[0] > self.l_range[1] {
            return bad(format!("empty l_range {:?}", self.l_range));
        }
        if !(self.x0 > 0.0 && self.x0 <= 0.5) || !(self.delta > 0.0 && self.delta < 0.5) {
            return bad("x0 must lie in (0, 0.5] and delta in (0, 0.5)".into());
        }
        match engine {
            Engine::Gz => {
                let w = self.w.as_ref().ok_or_else(|| CliError::Config("gz needs a jet `w`".into()))?;
                if w.first().map(|w0| w0.0 != Rational::from_integer(1.into())).unwrap_or(true) {
                    return bad("gz needs w₀ = 1".into());
                }
            }
            Engine::Accumulate => {
                if 2 * self.k + 1 == self.n {
                    return bad(format!("accumulate requires 2k ≠ n - 1 (n = {}, k = {})", self.n, self.k));
                }
                if self.c.0 == Rational::from_integer(0.into()) {
                    return bad("accumulate needs a nonzero amplitude c".into());
                }
            }
            Engine::Resonances => {
                if self.region.is_none() && self.interval.is_none() {
                    return bad("resonances needs a `region` or an `interval`".into());
                }
            }
            Engine::Normalform => {
                let nf = &self.normalform;
                if nf.w.iter().chain(&nf.omega0).any(|e| e.q.unsigned_abs() as usize > nf.q_max) {
                    return bad(format!("Fourier index beyond q_max = {}", nf.q_max));
                }
                if nf.w.iter().any(|e| e.m > nf.order) {
                    return bad("w entry beyond the requested order".into());
                }
            }
            Engine::Modes | Engine::Verify => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_parse_from_strings_and_integers() {
        let cfg = RunConfig::parse(r#"{"n": 2, "w": [1, "0", "-1/2", 0, "1/16"], "M": 7}"#).unwrap();
        let w = cfg.w.unwrap();
        assert_eq!(w[2].0, Rational::new((-1).into(), 2.into()));
        assert_eq!(cfg.order, Some(7));
        assert!(RunConfig::parse(r#"{"c": 0.5}"#).is_err());
        assert!(RunConfig::parse(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn accumulate_hypothesis_is_enforced() {
        let cfg = RunConfig::parse(r#"{"n": 3, "k": 1}"#).unwrap();
        assert!(cfg.validate(Engine::Modes).is_ok());
        assert!(matches!(cfg.validate(Engine::Accumulate), Err(CliError::Config(_))));
    }

    #[test]
    fn round_trip() {
        let cfg = RunConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::parse(&text).unwrap(), cfg);
    }
}
