use alloc::string::String;

use thiserror::Error;

use crate::jets::JetError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("no space form with sectional curvature {kappa}")]
    InvalidSpaceForm { kappa: i32 },
    #[error("direction is not a unit tangent normal (norm² {norm:e}, tangency {tangency:e})")]
    NotUnitTangent { norm: f64, tangency: f64 },
    #[error("point ({u}, {v}) lies outside the patch domain")]
    OutOfDomain { u: f64, v: f64 },
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("degenerate metric at ({u}, {v}): EG - F² = {det:e}")]
    DegenerateMetric { u: f64, v: f64, det: f64 },
    #[error("degenerate tangent frame at ({u}, {v})")]
    DegenerateFrame { u: f64, v: f64 },
    #[error("umbilic point at ({u}, {v}): k1 = {k1}, k2 = {k2}")]
    UmbilicPoint { u: f64, v: f64, k1: f64, k2: f64 },
    #[error("coordinates are not curvature-line at ({u}, {v}): defect {defect:e}")]
    NotCurvatureLine { u: f64, v: f64, defect: f64 },
    #[error("coordinates are not isothermic at ({u}, {v}): |E - G|/E = {defect:e}")]
    NotIsothermic { u: f64, v: f64, defect: f64 },
    #[error("focal degeneracy: 1 - t·k = {factor:e} at t = {t}")]
    FocalDegeneracy { t: f64, factor: f64 },
    #[error("operation requires Euclidean ambient space")]
    RequiresEuclidean,
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },
    #[error("profile radius {r:e} is not positive at v = {v}")]
    NonPositiveRadius { v: f64, r: f64 },
    #[error("neck collapse: profile radius reaches {r:e} at v = {v}")]
    NeckCollapse { v: f64, r: f64 },
    #[error("profile is not in isothermic normalization at v = {v}: defect {defect:e}")]
    NormalizationViolated { v: f64, defect: f64 },
    #[error("channel data violates the Codazzi constraint at u = {u}: defect {defect:e}")]
    CodazziViolation { u: f64, defect: f64 },
    #[error("at least 3 samples are needed for a Weingarten fit, got {count}")]
    InsufficientSamples { count: usize },
    #[error("bump support touches the patch boundary")]
    SupportTouchesBoundary,
    #[error("principal direction field undefined at ({u}, {v})")]
    OrientationUndefined { u: f64, v: f64 },
    #[error("ODE integration failed at t = {t}: {reason}")]
    OdeFailure { t: f64, reason: &'static str },
    #[error("numerical failure: {0}")]
    Numerical(&'static str),
}
