use serde::{Deserialize, Serialize};

use nilskew::complexity::Region;
use nilskew::config::SystemSpec;
use nilskew::rigidity::Observable;
use nilskew::rigidity::DEFAULT_GRID;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CfParams {
    pub k_max: usize,
}

impl Default for CfParams {
    fn default() -> Self {
        CfParams { k_max: 25 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OrbitParams {
    /// `[t, x, y, z]`.
    pub start: [f64; 4],
    pub n: u64,
    pub stride: u64,
}

impl Default for OrbitParams {
    fn default() -> Self {
        OrbitParams { start: [0.1, 0.2, 0.3, 0.0], n: 1000, stride: 1 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RigidityParams {
    pub grid: usize,
}

impl Default for RigidityParams {
    fn default() -> Self {
        RigidityParams { grid: DEFAULT_GRID }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CorrelateParams {
    pub n: u64,
    /// Defaults to the decades `10^3 .. n`.
    pub checkpoints: Option<Vec<u64>>,
    pub observable: Observable,
    pub start: [f64; 4],
}

impl Default for CorrelateParams {
    fn default() -> Self {
        CorrelateParams {
            n: 1_000_000,
            checkpoints: None,
            observable: Observable::Character { m0: 1, m1: 0, m2: 0 },
            start: [0.0, 0.0, 0.0, 0.0],
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ComplexityParams {
    pub eps: f64,
    /// Defaults to `max(2/eps, 4 (1 + sup|phi| + sup|eta|) * 10)`.
    pub l: Option<f64>,
    pub tau: f64,
    pub ks: Vec<usize>,
    /// Orbit lengths for the greedy cover; empty skips it.
    pub cover_n: Vec<u64>,
    pub cover_samples: usize,
    pub cover_eps: f64,
    pub region: Region,
}

impl Default for ComplexityParams {
    fn default() -> Self {
        ComplexityParams {
            eps: 0.5,
            l: None,
            tau: 0.5,
            ks: (10..=16).collect(),
            cover_n: Vec::new(),
            cover_samples: 1000,
            cover_eps: 0.3,
            region: Region::default(),
        }
    }
}

/// The JSON experiment file. Every section is optional.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub system: SystemSpec,
    pub seed: u64,
    pub threads: Option<usize>,
    pub out: Option<String>,
    pub format: Format,
    pub cf: CfParams,
    pub orbit: OrbitParams,
    pub rigidity: RigidityParams,
    pub correlate: CorrelateParams,
    pub complexity: ComplexityParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            system: SystemSpec::from_json(r#"{"alpha": "golden"}"#).expect("static spec"),
            seed: 0,
            threads: None,
            out: None,
            format: Format::Csv,
            cf: CfParams::default(),
            orbit: OrbitParams::default(),
            rigidity: RigidityParams::default(),
            correlate: CorrelateParams::default(),
            complexity: ComplexityParams::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.threads == Some(0) {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        if self.orbit.stride == 0 {
            return Err(CliError::Config("orbit.stride must be at least 1".into()));
        }
        if self.correlate.n == 0 {
            return Err(CliError::Config("correlate.n must be at least 1".into()));
        }
        if let Some(cps) = &self.correlate.checkpoints {
            if cps.iter().any(|&c| c == 0 || c > self.correlate.n) {
                return Err(CliError::Config("checkpoints must lie in [1, correlate.n]".into()));
            }
        }
        let c = &self.complexity;
        if !(c.eps > 0.0 && c.eps < 1.0) || !(c.cover_eps > 0.0 && c.cover_eps < 1.0) {
            return Err(CliError::Config("complexity eps values must lie in (0, 1)".into()));
        }
        if !(c.tau > 0.0) {
            return Err(CliError::Config("complexity.tau must be positive".into()));
        }
        if self.correlate.observable.validate().is_err() {
            return Err(CliError::Config("invalid observable".into()));
        }
        self.system.build().map_err(CliError::from)?;
        Ok(())
    }

    pub fn checkpoints(&self) -> Vec<u64> {
        if let Some(c) = &self.correlate.checkpoints {
            let mut c = c.clone();
            c.sort_unstable();
            c.dedup();
            return c;
        }
        let n = self.correlate.n;
        let mut out: Vec<u64> = std::iter::successors(Some(1000u64), |&c| c.checked_mul(10)).take_while(|&c| c < n).collect();
        out.push(n);
        out
    }
}
