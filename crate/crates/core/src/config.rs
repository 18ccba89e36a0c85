//! JSON system specifications.

use std::collections::BTreeMap;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::dynamics::SkewSystem;
use crate::error::{Error, Result};
use crate::numtheory::{classify_index_sets, AlphaSpec, IndexSets, RotationNumber};
use crate::periodic::{DecayClass, PeriodicFn};

pub const DEFAULT_EPSILON: f64 = 0.009;
pub const DEFAULT_DEPTH: usize = 25;
pub const DEFAULT_K: i64 = 256;

/// `{"trig": {"m": [re, im], ...}, "mean": v, "class": {"r": .., "C": ..}, "real": true}`.
///
/// For real functions a missing `-m` entry is filled with the conjugate of `m`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FnSpec {
    #[serde(default)]
    pub trig: BTreeMap<String, [f64; 2]>,
    #[serde(default)]
    pub mean: f64,
    #[serde(default)]
    pub class: Option<DecayClass>,
    #[serde(default = "yes")]
    pub real: bool,
}

fn yes() -> bool {
    true
}

impl FnSpec {
    pub fn build(&self, k_cap: i64) -> Result<PeriodicFn<f64>> {
        let mut coeffs: BTreeMap<i64, Complex<f64>> = BTreeMap::new();
        for (key, [re, im]) in &self.trig {
            let m: i64 = key.trim().parse().map_err(|_| Error::Config(format!("frequency {key:?} is not an integer")))?;
            if m == 0 {
                return Err(Error::Config("use \"mean\" for the zero frequency".into()));
            }
            if m.abs() > k_cap {
                return Err(Error::Config(format!("frequency {m} exceeds K = {k_cap}")));
            }
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::Config(format!("coefficient at {m} is not finite")));
            }
            coeffs.insert(m, Complex::new(*re, *im));
        }
        if self.real {
            let missing: Vec<_> = coeffs.iter().filter(|(m, _)| !coeffs.contains_key(&-**m)).map(|(&m, &c)| (-m, c.conj())).collect();
            coeffs.extend(missing);
        }
        coeffs.insert(0, Complex::new(self.mean, 0.0));
        let f = PeriodicFn::new(coeffs, self.class).map_err(|e| Error::Config(e.to_string()))?;
        if self.real && !f.is_real(1e-12 * (1.0 + f.l1_norm())) {
            return Err(Error::Config("declared real but the coefficients are not conjugate-symmetric".into()));
        }
        Ok(f)
    }
}

/// `{alpha, phi, eta, psi, B, theta, K, depth}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub alpha: String,
    #[serde(default)]
    pub phi: FnSpec,
    #[serde(default)]
    pub eta: FnSpec,
    #[serde(default)]
    pub psi: FnSpec,
    #[serde(rename = "B", default)]
    pub b: Option<f64>,
    #[serde(default)]
    pub theta: Option<f64>,
    #[serde(rename = "K", default)]
    pub k: Option<i64>,
    #[serde(default)]
    pub depth: Option<usize>,
}

/// A validated system with its index sets.
#[derive(Clone, Debug)]
pub struct Built {
    pub system: SkewSystem<f64>,
    pub sets: IndexSets,
}

impl SystemSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    /// `(theta, B)`, defaulting through `theta = eps / 8`, `B = 2 + 16 theta`.
    pub fn parameters(&self) -> (f64, f64) {
        match (self.theta, self.b) {
            (Some(t), Some(b)) => (t, b),
            (Some(t), None) => (t, 2.0 + 16.0 * t),
            (None, Some(b)) => ((b - 2.0) / 16.0, b),
            (None, None) => {
                let t = DEFAULT_EPSILON / 8.0;
                (t, 2.0 + 16.0 * t)
            }
        }
    }

    pub fn rotation(&self) -> Result<RotationNumber> {
        let spec: AlphaSpec = self.alpha.parse().map_err(|e: Error| Error::Config(e.to_string()))?;
        RotationNumber::expand(&spec, self.depth.unwrap_or(DEFAULT_DEPTH)).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn build(&self) -> Result<Built> {
        let rn = self.rotation()?;
        let k = self.k.unwrap_or(DEFAULT_K);
        if k < 1 {
            return Err(Error::Config("K must be positive".into()));
        }
        let (theta, b) = self.parameters();
        let sets = classify_index_sets(&rn, theta, b).map_err(|e| Error::Config(e.to_string()))?;
        let system = SkewSystem::new(rn, self.phi.build(k)?, self.eta.build(k)?, self.psi.build(k)?)
            .map_err(|e| Error::Config(e.to_string()))?;
        Ok(Built { system, sets })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_builds() {
        let s = r#"{
            "alpha": "golden",
            "phi": {"trig": {"1": [0.5, 0.0]}, "class": {"r": 2.02, "C": 1.0}},
            "eta": {"trig": {"1": [0.0, -0.5]}},
            "psi": {"trig": {"2": [0.25, 0.0]}, "mean": 0.1},
            "K": 8
        }"#;
        let b = SystemSpec::from_json(s).unwrap().build().unwrap();
        assert!((b.system.phi().eval_re(0.0) - 1.0).abs() < 1e-15);
        assert!((b.system.eta().eval_re(0.25) - 1.0).abs() < 1e-15);
        assert!((b.system.psi().mean().re - 0.1).abs() < 1e-15);
        assert!((b.sets.theta - 0.001125).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_specs() {
        for s in [
            r#"{"alpha": "golden", "phi": {"mean": 0.3}}"#,
            r#"{"alpha": "golden", "phi": {"trig": {"9": [1, 0]}}, "K": 4}"#,
            r#"{"alpha": "golden", "phi": {"trig": {"1": [1, 0]}, "class": {"r": 2, "C": 0.1}}}"#,
            r#"{"alpha": "nope"}"#,
            r#"{"alpha": "golden", "extra": 1}"#,
            r#"{"alpha": "golden", "phi": {"trig": {"1": [1, 0], "-1": [2, 0]}}}"#,
        ] {
            let r = SystemSpec::from_json(s).and_then(|c| c.build());
            assert!(matches!(r, Err(Error::Config(_))), "{s}");
        }
    }
}
