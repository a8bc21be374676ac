//! Run configuration shared by every command, stored as versioned JSON.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::continuation::ContinuationConfig;
use crate::error::{Error, Result};
use crate::geometry::PotentialSpec;
use crate::integrator::IntegratorConfig;
use crate::orbit::DEFAULT_SAMPLES;
use crate::shooting::DEFAULT_TOL;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { tol: DEFAULT_TOL, max_iter: 40 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScanConfig {
    pub x0: f64,
    pub y0_range: (f64, f64),
    pub v_range: (f64, f64),
    pub n_y0: usize,
    pub n_v: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig { x0: 0.75, y0_range: (0.45, 1.3), v_range: (0.05, 0.7), n_y0: 200, n_v: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OrbitConfig {
    /// Samples per period; must be a multiple of 12.
    pub n_samples: usize,
}

impl Default for OrbitConfig {
    fn default() -> Self {
        OrbitConfig { n_samples: DEFAULT_SAMPLES }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub schema_version: u32,
    pub potential: PotentialSpec,
    pub integrator: IntegratorConfig,
    pub solver: SolverConfig,
    pub scan: ScanConfig,
    pub continuation: ContinuationConfig,
    pub orbit: OrbitConfig,
    pub output_dir: PathBuf,
    /// Seed for any randomized sampling. Nothing in the default pipeline
    /// draws random numbers; it is recorded so reruns are unambiguous.
    pub seed: u64,
    /// Worker threads for grid scans; `None` uses all cores.
    pub jobs: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schema_version: SCHEMA_VERSION,
            potential: PotentialSpec::lennard_jones_12_6(),
            integrator: IntegratorConfig::default(),
            solver: SolverConfig::default(),
            scan: ScanConfig::default(),
            continuation: ContinuationConfig::default(),
            orbit: OrbitConfig::default(),
            output_dir: PathBuf::from("out"),
            seed: 0,
            jobs: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        self.integrator.validate()?;
        self.continuation.validate()?;
        if !(self.solver.tol > 0.0) || self.solver.max_iter == 0 {
            return Err(Error::Config(format!("bad solver settings {:?}", self.solver)));
        }
        let s = &self.scan;
        let range_ok = |(a, b): (f64, f64)| a > 0.0 && a < b && b.is_finite();
        if !(s.x0 > 0.0) || !range_ok(s.y0_range) || !range_ok(s.v_range) || s.n_y0 < 2 || s.n_v < 2 {
            return Err(Error::Config(format!("bad scan settings {s:?}")));
        }
        if self.orbit.n_samples == 0 || self.orbit.n_samples % 12 != 0 {
            return Err(Error::Config(format!("orbit.n_samples = {} is not a positive multiple of 12", self.orbit.n_samples)));
        }
        if self.jobs == Some(0) {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(format!("cannot parse config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}
