//! Compactly supported normal variations and the numerical first variation of
//! the Lie energy.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::grid::{Domain, Grid};
use crate::jets::Jet2;
use crate::lie_energy::{invariant_energy, DirectionField};
use crate::spaceform::JetVector;
use crate::surface::{self, ImmersionPatch};

/// Default relative step of the central difference in `ε`.
pub const DEFAULT_EPSILON: f64 = 1e-4;

/// `A exp(−s²/(1 − s²))` with `s² = ((u − u0)/ru)² + ((v − v0)/rv)²`, zero for `s ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpFunction {
    pub center: (f64, f64),
    pub radii: (f64, f64),
    pub amplitude: f64,
}

impl BumpFunction {
    pub fn new(center: (f64, f64), radii: (f64, f64), amplitude: f64) -> Result<Self, Error> {
        if !(radii.0 > 0.0 && radii.1 > 0.0) {
            return Err(Error::InvalidParameter { name: "radii".into(), reason: "must be positive".into() });
        }
        if !(amplitude.is_finite() && center.0.is_finite() && center.1.is_finite()) {
            return Err(Error::InvalidParameter { name: "bump".into(), reason: "not finite".into() });
        }
        Ok(Self { center, radii, amplitude })
    }

    /// Bounding box of the support.
    pub fn support(&self) -> Domain {
        let (u0, v0) = self.center;
        let (ru, rv) = self.radii;
        Domain { u0: u0 - ru, u1: u0 + ru, v0: v0 - rv, v1: v0 + rv }
    }

    /// Whether the closed support lies in the open interior of `domain`.
    pub fn fits_inside(&self, domain: &Domain) -> bool {
        let s = self.support();
        s.u0 > domain.u0 && s.u1 < domain.u1 && s.v0 > domain.v0 && s.v1 < domain.v1
    }

    /// `|A| ru rv`, the size against which first variations are compared.
    pub fn scale(&self) -> f64 {
        self.amplitude.abs() * self.radii.0 * self.radii.1
    }

    pub fn jet(&self, u: f64, v: f64, order: usize) -> Jet2 {
        let a = (Jet2::var_u(u, order) - self.center.0) / self.radii.0;
        let b = (Jet2::var_v(v, order) - self.center.1) / self.radii.1;
        let s2 = a * a + b * b;
        if s2.value() >= 1.0 {
            return Jet2::zero(order);
        }
        (-(s2 / (1.0 - s2))).exp() * self.amplitude
    }

    pub fn value(&self, u: f64, v: f64) -> f64 {
        self.jet(u, v, 0).value()
    }
}

/// A bump whose support lies strictly inside `domain`.
pub fn bump(center: (f64, f64), radii: (f64, f64), amplitude: f64, domain: &Domain) -> Result<BumpFunction, Error> {
    let b = BumpFunction::new(center, radii, amplitude)?;
    if !b.fits_inside(domain) {
        return Err(Error::SupportTouchesBoundary);
    }
    Ok(b)
}

/// Seeded bumps: centers in the middle 40% of the domain and radii between
/// 10% and 25% of its sides, so supports stay interior.
pub fn random_bumps(domain: &Domain, count: usize, seed: u64) -> Vec<BumpFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let (cu, cv) = (rng.gen_range(0.3..0.7), rng.gen_range(0.3..0.7));
            let (ru, rv) = (rng.gen_range(0.1..0.25), rng.gen_range(0.1..0.25));
            let amplitude = rng.gen_range(0.5..1.0);
            let center = domain.from_unit(cu, cv);
            BumpFunction { center, radii: (ru * domain.width(), rv * domain.height()), amplitude }
        })
        .collect()
}

/// `X_ε = exp_X(ε φ n)`. Points outside the support evaluate the base patch
/// directly.
pub fn perturb_normal(p: &ImmersionPatch, phi: &BumpFunction, eps: f64) -> Result<ImmersionPatch, Error> {
    if !phi.fits_inside(&p.domain) {
        return Err(Error::SupportTouchesBoundary);
    }
    let reach = (eps * phi.amplitude).abs();
    if reach > 0.0 {
        let kmax = Grid::new(9, 9, phi.support())
            .points()
            .map(|(_, _, u, v)| {
                let geo = surface::local_geometry(p, u, v, 2)?;
                let (h, k) = geo.forms.mean_gauss();
                let (h, k) = (h.value(), k.value());
                Ok(h.abs() + libm::sqrt((h * h - k).max(0.0)))
            })
            .try_fold(0.0f64, |m, r: Result<f64, Error>| r.map(|x| m.max(x)))?;
        let factor = 1.0 - reach * kmax;
        if !(factor > 1e-6) {
            return Err(Error::FocalDegeneracy { t: reach, factor });
        }
    }
    let base = p.clone();
    let phi = *phi;
    let sf = p.sf;
    let out = ImmersionPatch::new(alloc::format!("{} (perturbed)", p.label), p.sf, p.domain, move |u, v, order| {
        let t = phi.jet(u, v, order) * eps;
        if t.max_abs() == 0.0 {
            return base.eval(u, v, order);
        }
        let geo = surface::local_geometry(&base, u, v, (order + 1).max(2))?;
        let x: JetVector = core::array::from_fn(|i| geo.position[i].truncate(order));
        Ok(sf.exp_normal_jet(&x, &geo.normal, &t))
    })
    .with_tags(surface::PatchTags { isothermic: false, rotational: false, umbilic: false });
    Ok(out)
}

/// Central difference `(L[X_ε] − L[X_{−ε}]) / 2ε`, with `L` integrated from the
/// invariant density over the bump's support box using `grid.nx × grid.ny`
/// Gauss–Legendre nodes. Outside the support both patches coincide.
pub fn first_variation(p: &ImmersionPatch, phi: &BumpFunction, grid: &Grid, eps: f64) -> Result<f64, Error> {
    if !(eps != 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter { name: "eps".into(), reason: "must be finite and nonzero".into() });
    }
    let support = phi.support();
    let energy = |e: f64| -> Result<f64, Error> {
        let q = perturb_normal(p, phi, e)?;
        invariant_energy(&q, &support, grid.nx, grid.ny, DirectionField::Aligned)
    };
    Ok((energy(eps)? - energy(-eps)?) / (2.0 * eps))
}
