//! Run configuration, read from TOML.
//!
//! ```toml
//! seed = 7
//!
//! [surface]
//! fixture = "unduloid"
//! params = { H = 0.5, r0 = 0.6 }
//!
//! [grid]
//! nx = 32
//! ny = 32
//!
//! [analyses]
//! curvature = true
//! el = true
//! energy = true
//! weingarten = true
//! parallel = [-0.1, 0.1]
//! variation = { count = 10 }
//!
//! [output]
//! report = "unduloid.json"
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    #[serde(default)]
    pub seed: u64,
    pub surface: SurfaceSpec,
    /// Overrides the fixture's parameter domain.
    #[serde(default)]
    pub domain: Option<DomainSpec>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub analyses: Analyses,
    #[serde(default)]
    pub output: OutputPaths,
}

/// A named fixture with parameters, or a profile table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    #[serde(default)]
    pub fixture: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    /// CSV with header `s,r,h`, rotated about the `h` axis. Relative paths
    /// resolve against the config file's directory.
    #[serde(default)]
    pub profile: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub u: [f64; 2],
    pub v: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { nx: 32, ny: 32 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub umbilic: f64,
    pub curvature_line: f64,
    pub fit: f64,
    /// Normalized Euler–Lagrange residual and energy.
    pub residual: f64,
    /// Structure-equation residuals.
    pub structure: f64,
    /// First variation relative to the bump scale.
    pub variation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { umbilic: 1e-8, curvature_line: 1e-8, fit: 1e-6, residual: 1e-9, structure: 1e-8, variation: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Analyses {
    pub curvature: bool,
    pub el: bool,
    pub energy: bool,
    pub structure: bool,
    pub channel: bool,
    pub weingarten: bool,
    /// Offset distances for the Bonnet check.
    pub parallel: Vec<f64>,
    pub variation: Option<VariationSpec>,
}

impl Analyses {
    pub fn everything() -> Self {
        Self { curvature: true, el: true, energy: true, structure: true, channel: true, weingarten: true, ..Self::default() }
    }

    pub fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VariationSpec {
    /// Number of seeded random bumps.
    pub count: usize,
    pub epsilon: f64,
    /// Gauss–Legendre nodes per direction over each bump's support.
    pub nodes: usize,
    /// Additional explicit bumps.
    pub bumps: Vec<BumpSpec>,
}

impl Default for VariationSpec {
    fn default() -> Self {
        Self { count: 10, epsilon: 1e-4, nodes: 48, bumps: Vec::new() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpSpec {
    pub center: [f64; 2],
    pub radii: [f64; 2],
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputPaths {
    pub report: Option<PathBuf>,
    pub curvature_csv: Option<PathBuf>,
    pub variation_csv: Option<PathBuf>,
    pub mesh: Option<PathBuf>,
}

impl AnalysisConfig {
    /// A configuration for a named fixture with no analyses.
    pub fn fixture(name: &str) -> Self {
        Self {
            seed: 0,
            surface: SurfaceSpec { fixture: Some(name.to_string()), params: BTreeMap::new(), profile: None },
            domain: None,
            grid: GridSpec::default(),
            tolerances: Tolerances::default(),
            analyses: Analyses::default(),
            output: OutputPaths::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let config: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        match (&self.surface.fixture, &self.surface.profile) {
            (Some(_), None) | (None, Some(_)) => {}
            _ => return bad("surface needs exactly one of `fixture` or `profile`".into()),
        }
        if self.surface.profile.is_some() && !self.surface.params.is_empty() {
            return bad("surface params apply to fixtures only".into());
        }
        if self.grid.nx < 8 || self.grid.ny < 8 {
            return bad(format!("grid {}x{} is below the 8x8 minimum", self.grid.nx, self.grid.ny));
        }
        let t = &self.tolerances;
        for (name, value) in [
            ("umbilic", t.umbilic),
            ("curvature_line", t.curvature_line),
            ("fit", t.fit),
            ("residual", t.residual),
            ("structure", t.structure),
            ("variation", t.variation),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return bad(format!("tolerance `{name}` must be positive, got {value}"));
            }
        }
        if let Some(d) = &self.domain {
            if !(d.u[0] < d.u[1] && d.v[0] < d.v[1]) {
                return bad("domain bounds must be increasing".into());
            }
        }
        if self.analyses.parallel.iter().any(|t| !t.is_finite()) {
            return bad("parallel offsets must be finite".into());
        }
        if let Some(v) = &self.analyses.variation {
            if !(v.epsilon > 0.0 && v.epsilon.is_finite()) || v.nodes == 0 {
                return bad("variation needs a positive epsilon and node count".into());
            }
        }
        Ok(())
    }
}
