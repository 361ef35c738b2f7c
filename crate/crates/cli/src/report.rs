//! The JSON report. Field order is fixed by declaration order, so equal
//! reports serialize to identical bytes.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// A number together with the tolerance it is judged against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measure {
    pub value: f64,
    pub tolerance: f64,
}

impl Measure {
    pub fn new(value: f64, tolerance: f64) -> Self {
        Self { value, tolerance }
    }

    pub fn within(&self) -> bool {
        self.value.abs() <= self.tolerance
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    /// Umbilic tolerance used while evaluating the samples.
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceReport {
    pub schema_version: u32,
    pub generator: String,
    pub surface: SurfaceMeta,
    pub seed: u64,
    pub grid: [usize; 2],
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coordinates: Option<CoordinateSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curvature: Option<CurvatureSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler_lagrange: Option<ElReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<EnergyReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<StructureReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weingarten: Option<WeingartenReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bonnet: Vec<BonnetRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variation: Option<VariationReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub verdicts: Vec<Verdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceMeta {
    pub name: String,
    pub source: String,
    pub params: BTreeMap<String, f64>,
    pub kappa: i32,
    /// `[u0, u1, v0, v1]`.
    pub domain: [f64; 4],
    pub rotational: bool,
    pub isothermic: bool,
    pub umbilic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoordinateSummary {
    pub curvature_line: bool,
    pub isothermic: bool,
    pub max_f: Measure,
    pub max_m: Measure,
    pub max_conformal_defect: Measure,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSummary {
    pub k1: Range,
    pub k2: Range,
    pub h: Range,
    pub k: Range,
    /// Spread of `H` over the samples, judged against the fit tolerance.
    pub h_stddev: Measure,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElReport {
    pub max_normalized: Measure,
    pub mean_normalized: Measure,
    pub max_abs_r1: Measure,
    pub max_abs_r2: Measure,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub value: Measure,
    /// Gauss–Legendre nodes per direction.
    pub nodes: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelReport {
    pub channel: bool,
    pub kind: String,
    pub max_k1_u: Measure,
    pub max_k2_v: Measure,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub codazzi_max: Measure,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauss_max: Option<Measure>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFitReport {
    /// `(a, b, c)` of `aK + 2bH + c = 0`, unit length.
    pub coeffs: [f64; 3],
    pub delta: Measure,
    pub fit_residual: Measure,
    pub null_dim: usize,
    pub holds: bool,
    pub tubular: bool,
    pub elliptic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineFitReport {
    /// `(x, y, z)` of `x k1 + y k2 + z = 0`, unit length.
    pub coeffs: [f64; 3],
    pub fit_residual: Measure,
    pub null_dim: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeingartenReport {
    pub linear: LinearFitReport,
    pub affine: AffineFitReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BonnetRow {
    pub t: f64,
    pub predicted: [f64; 3],
    pub fitted: [f64; 3],
    pub angle: Measure,
    pub delta: f64,
    pub delta_t: f64,
    pub delta_error: Measure,
    pub fit_residual: Measure,
}

impl BonnetRow {
    pub fn holds(&self) -> bool {
        self.angle.within() && self.delta_error.within() && self.fit_residual.within()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationReport {
    pub epsilon: f64,
    pub nodes: usize,
    pub rows: Vec<VariationRow>,
    /// Largest `|dL/dε|` relative to the bump scale.
    pub max_scaled: Measure,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationRow {
    pub id: usize,
    pub center: [f64; 2],
    pub radii: [f64; 2],
    pub amplitude: f64,
    pub dl_deps: f64,
    pub scaled: Measure,
}

/// A yes/no statement tied to a named result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub tag: String,
    pub statement: String,
    pub holds: bool,
    pub tolerance: f64,
}

impl SurfaceReport {
    pub fn verdict(&self, tag: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.tag == tag)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let r: Self = serde_json::from_str(text).map_err(|e| CliError::Config(format!("malformed report: {e}")))?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!("unsupported report schema {}", r.schema_version)));
        }
        Ok(r)
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_json()).map_err(|e| CliError::io(path, e))
    }
}
