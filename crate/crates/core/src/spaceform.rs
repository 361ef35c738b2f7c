//! The three Riemannian space forms as quadrics in a four-dimensional ambient space.
//!
//! * `κ = +1`: the unit sphere `⟨p,p⟩ = 1` in Euclidean `R⁴`;
//! * `κ = -1`: the upper sheet `⟨p,p⟩ = -1` in Minkowski `R^{3,1}` (last axis timelike);
//! * `κ = 0`: the affine slice `p₄ = 1` of Euclidean `R⁴`, i.e. `R³` with a
//!   homogeneous coordinate, so all three geometries share one code path.

use crate::error::Error;
use crate::jets::Jet2;

/// Tolerance on unit length and tangency of normal directions.
pub const TANGENCY_TOL: f64 = 1e-9;

pub type AmbientVector = [f64; 4];

/// An ambient vector whose components are jets.
pub type JetVector = [Jet2; 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceForm {
    Euclidean,
    Spherical,
    Hyperbolic,
}

impl SpaceForm {
    pub fn from_curvature(kappa: i32) -> Result<Self, Error> {
        match kappa {
            0 => Ok(Self::Euclidean),
            1 => Ok(Self::Spherical),
            -1 => Ok(Self::Hyperbolic),
            _ => Err(Error::InvalidSpaceForm { kappa }),
        }
    }

    /// Sectional curvature κ.
    pub fn kappa(self) -> f64 {
        match self {
            Self::Euclidean => 0.0,
            Self::Spherical => 1.0,
            Self::Hyperbolic => -1.0,
        }
    }

    pub fn kappa_int(self) -> i32 {
        self.kappa() as i32
    }

    /// Diagonal of the ambient metric.
    pub fn signature(self) -> [f64; 4] {
        match self {
            Self::Hyperbolic => [1.0, 1.0, 1.0, -1.0],
            _ => [1.0; 4],
        }
    }

    pub fn inner(self, a: &AmbientVector, b: &AmbientVector) -> f64 {
        let s = self.signature();
        (0..4).map(|i| s[i] * a[i] * b[i]).sum()
    }

    pub fn inner_jet(self, a: &JetVector, b: &JetVector) -> Jet2 {
        let s = self.signature();
        let mut acc = a[0] * b[0];
        for i in 1..4 {
            acc += a[i] * b[i] * s[i];
        }
        acc
    }

    /// Signed distance-like defect from the model quadric: `⟨p,p⟩ − 1/κ`, or
    /// `p₄ − 1` for the flat slice.
    pub fn quadric_residual(self, p: &AmbientVector) -> f64 {
        match self {
            Self::Euclidean => p[3] - 1.0,
            _ => self.inner(p, p) - 1.0 / self.kappa(),
        }
    }

    /// Point at geodesic distance `t` from `p` in the unit normal direction `n`.
    pub fn exp_normal(self, p: &AmbientVector, n: &AmbientVector, t: f64) -> Result<AmbientVector, Error> {
        self.check_unit_tangent(p, n)?;
        let (a, b) = self.geodesic_weights(t);
        Ok(core::array::from_fn(|i| a * p[i] + b * n[i]))
    }

    /// Jet version of [`SpaceForm::exp_normal`] for a distance that varies over the
    /// parameter domain; `p` and `n` are assumed compatible.
    pub fn exp_normal_jet(self, p: &JetVector, n: &JetVector, t: &Jet2) -> JetVector {
        match self {
            Self::Euclidean => core::array::from_fn(|i| p[i] + n[i] * *t),
            Self::Spherical => {
                let (c, s) = (t.cos(), t.sin());
                core::array::from_fn(|i| p[i] * c + n[i] * s)
            }
            Self::Hyperbolic => {
                let (c, s) = (t.cosh(), t.sinh());
                core::array::from_fn(|i| p[i] * c + n[i] * s)
            }
        }
    }

    fn geodesic_weights(self, t: f64) -> (f64, f64) {
        match self {
            Self::Euclidean => (1.0, t),
            Self::Spherical => (libm::cos(t), libm::sin(t)),
            Self::Hyperbolic => (libm::cosh(t), libm::sinh(t)),
        }
    }

    fn check_unit_tangent(self, p: &AmbientVector, n: &AmbientVector) -> Result<(), Error> {
        let norm = self.inner(n, n);
        let tangency = match self {
            Self::Euclidean => n[3],
            _ => self.inner(p, n),
        };
        if (norm - 1.0).abs() > TANGENCY_TOL || tangency.abs() > TANGENCY_TOL {
            return Err(Error::NotUnitTangent { norm, tangency });
        }
        Ok(())
    }
}

/// Value part of a jet vector.
pub fn values(v: &JetVector) -> AmbientVector {
    core::array::from_fn(|i| v[i].value())
}

pub fn inner(a: &AmbientVector, b: &AmbientVector, sf: SpaceForm) -> f64 {
    sf.inner(a, b)
}

pub fn quadric_residual(p: &AmbientVector, sf: SpaceForm) -> f64 {
    sf.quadric_residual(p)
}

pub fn exp_normal(p: &AmbientVector, n: &AmbientVector, t: f64, sf: SpaceForm) -> Result<AmbientVector, Error> {
    sf.exp_normal(p, n, t)
}
