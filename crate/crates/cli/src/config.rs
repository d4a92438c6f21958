use std::path::{Path, PathBuf};

use mellin_core::numerics::plane::{PlaneQuadrature, TestFunction};
use mellin_core::numerics::ray::{ExpLaurent, SGrid};
use mellin_core::{Error, Result};
use serde::{Deserialize, Serialize};

/// Settings shared by all subcommands. Loaded from TOML, then overridden by flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Truncation order `N` per direction.
    pub truncation: usize,
    /// Degree bound on series coefficients.
    pub degree_bound: u32,
    /// Random samples per Koszul check.
    pub samples: usize,
    /// Acceptance threshold of the check; each subcommand has its own default.
    pub tolerance: Option<f64>,
    pub quadrature: PlaneQuadrature,
    pub grid: SGrid,
    pub function: Option<String>,
    /// Declarative plane function, used when `function = "custom"`.
    pub plane_function: Option<TestFunction>,
    /// Declarative ray function, used when `function = "custom"`.
    pub ray_function: Option<RaySpec>,
    /// Not echoed into reports, so the same run written to two places is byte-identical.
    #[serde(skip_serializing)]
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            truncation: 12,
            degree_bound: 16,
            samples: 4,
            tolerance: None,
            quadrature: PlaneQuadrature::default(),
            grid: SGrid { start: 0.5, stop: 3.0, count: 20, offset: 0.0 },
            function: None,
            plane_function: None,
            ray_function: None,
            output: None,
        }
    }
}

/// `t^power · exp(Σ a·t^k)`, written as a list because TOML keys are strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RaySpec {
    #[serde(default)]
    pub power: f64,
    pub exponent: Vec<RayTerm>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RayTerm {
    pub k: i32,
    pub a: f64,
}

impl RaySpec {
    pub fn to_function(&self) -> ExpLaurent {
        ExpLaurent::new(self.power, self.exponent.iter().map(|t| (t.k, t.a)))
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::InvalidInput(format!("bad config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        if self.truncation < 4 {
            return Err(Error::InvalidInput(format!("truncation must be at least 4, got {}", self.truncation)));
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0) {
                return Err(Error::InvalidInput("tolerance must be positive".into()));
            }
        }
        if !(self.quadrature.tolerance > 0.0) || !(self.quadrature.tail_eps > 0.0) {
            return Err(Error::InvalidInput("quadrature tolerances must be positive".into()));
        }
        SGrid::new(self.grid.start, self.grid.stop, self.grid.count, self.grid.offset)?;
        Ok(())
    }
}
