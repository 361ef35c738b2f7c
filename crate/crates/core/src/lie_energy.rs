//! The Lie-invariant energy `∫ k1_u k2_v / (k1 − k2)² du dv`, its
//! Euler–Lagrange residuals, a coordinate-free density for patches whose
//! coordinates are not curvature lines, and channel diagnostics.

use alloc::vec::Vec;

use crate::error::Error;
use crate::grid::{Domain, Grid};
use crate::jets::Jet2;
use crate::quadrature::TensorRule;
use crate::surface::{self, curvature_data, CurvatureData, FormJets, ImmersionPatch, LENGTH_SCALE, UMBILIC_TOL};

/// Default Gauss–Legendre nodes per direction.
pub const DEFAULT_NODES: usize = 32;

/// Euler–Lagrange residuals `R1 = (k2 − k1) k1_uv + 2 k1_u k1_v` and
/// `R2 = (k1 − k2) k2_uv + 2 k2_u k2_v`, raw and divided by `(|k1| + |k2| + 1/ℓ)³`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ELResiduals {
    pub r1: f64,
    pub r2: f64,
    pub r1_normalized: f64,
    pub r2_normalized: f64,
}

impl ELResiduals {
    pub fn max_normalized(&self) -> f64 {
        self.r1_normalized.abs().max(self.r2_normalized.abs())
    }
}

pub fn el_residuals(c: &CurvatureData) -> ELResiduals {
    let r1 = (c.k2 - c.k1) * c.k1_uv + 2.0 * c.k1_u * c.k1_v;
    let r2 = (c.k1 - c.k2) * c.k2_uv + 2.0 * c.k2_u * c.k2_v;
    let s = c.k1.abs() + c.k2.abs() + 1.0 / LENGTH_SCALE;
    let s3 = s * s * s;
    ELResiduals { r1, r2, r1_normalized: r1 / s3, r2_normalized: r2 / s3 }
}

/// Summary of residuals over a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ELSummary {
    pub max_normalized: f64,
    pub mean_normalized: f64,
    pub max_abs_r1: f64,
    pub max_abs_r2: f64,
    pub points: usize,
}

pub fn el_summary(p: &ImmersionPatch, grid: &Grid, tol_umb: f64) -> Result<ELSummary, Error> {
    let mut out = ELSummary { max_normalized: 0.0, mean_normalized: 0.0, max_abs_r1: 0.0, max_abs_r2: 0.0, points: 0 };
    for (_, _, u, v) in grid.points() {
        let r = el_residuals(&curvature_data(p, u, v, tol_umb)?);
        out.max_normalized = out.max_normalized.max(r.max_normalized());
        out.mean_normalized += r.max_normalized();
        out.max_abs_r1 = out.max_abs_r1.max(r.r1.abs());
        out.max_abs_r2 = out.max_abs_r2.max(r.r2.abs());
        out.points += 1;
    }
    if out.points > 0 {
        out.mean_normalized /= out.points as f64;
    }
    Ok(out)
}

/// Coordinate integrand `k1_u k2_v / (k1 − k2)²`.
pub fn lie_integrand(c: &CurvatureData) -> f64 {
    let gap = c.k1 - c.k2;
    c.k1_u * c.k2_v / (gap * gap)
}

/// Energy over the grid's domain by tensor Gauss–Legendre quadrature with
/// `grid.nx × grid.ny` nodes.
pub fn lie_energy(p: &ImmersionPatch, grid: &Grid) -> Result<f64, Error> {
    lie_energy_on(p, &grid.domain, grid.nx, grid.ny)
}

pub fn lie_energy_on(p: &ImmersionPatch, domain: &Domain, nu: usize, nv: usize) -> Result<f64, Error> {
    if domain.area() == 0.0 || nu == 0 || nv == 0 {
        return Ok(0.0);
    }
    TensorRule::new(domain, nu, nv).integrate(|u, v| Ok(lie_integrand(&curvature_data(p, u, v, UMBILIC_TOL)?)))
}

/// How the unit principal directions `e1, e2` are chosen where coordinates
/// are not curvature lines. `e1` is the principal direction closest to the
/// reference, signed to have positive component along it; `e2` is the other
/// one, signed to have positive component along `∂v` (or the rotated reference).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DirectionField {
    /// Reference `∂u`; reproduces the labeling of curvature-line coordinates.
    Aligned,
    /// Reference given as parameter-space coefficients `(a, b)` of `a ∂u + b ∂v`.
    Reference([f64; 2]),
}

/// Principal data at a point in arbitrary coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrincipalFrame {
    pub k1: f64,
    pub k2: f64,
    pub e1: [f64; 2],
    pub e2: [f64; 2],
    /// Directional derivatives `dk1(e1)`, `dk2(e2)`.
    pub dk1_e1: f64,
    pub dk2_e2: f64,
    /// Area element `√(EG − F²)`.
    pub area_element: f64,
}

fn metric_dot(f: &crate::surface::FundamentalForms, a: [f64; 2], b: [f64; 2]) -> f64 {
    f.e * a[0] * b[0] + f.f * (a[0] * b[1] + a[1] * b[0]) + f.g * a[1] * b[1]
}

fn eigen_direction(f: &crate::surface::FundamentalForms, k: f64) -> [f64; 2] {
    // rows of (II − k I) annihilate the eigenvector; take the better conditioned one
    let a = [f.m - k * f.f, -(f.l - k * f.e)];
    let b = [f.n - k * f.g, -(f.m - k * f.f)];
    let na = a[0] * a[0] + a[1] * a[1];
    let nb = b[0] * b[0] + b[1] * b[1];
    if na >= nb {
        a
    } else {
        b
    }
}

fn normalized(f: &crate::surface::FundamentalForms, x: [f64; 2]) -> [f64; 2] {
    let n = libm::sqrt(metric_dot(f, x, x));
    [x[0] / n, x[1] / n]
}

/// Principal curvatures `H ± √(H² − K)` as jets with their directions.
pub fn principal_frame(forms: &FormJets, at: (f64, f64), field: DirectionField) -> Result<PrincipalFrame, Error> {
    let (h, k) = forms.mean_gauss();
    let disc = h * h - k;
    let vals = forms.values();
    let (hv, dv) = (h.value(), disc.value());
    let scale = surface::curvature_scale(hv + libm::sqrt(dv.max(0.0)), hv - libm::sqrt(dv.max(0.0)));
    if !(dv > (UMBILIC_TOL * scale) * (UMBILIC_TOL * scale)) {
        return Err(Error::OrientationUndefined { u: at.0, v: at.1 });
    }
    let root = disc.sqrt();
    let (kp, km) = (h + root, h - root);
    let dp = normalized(&vals, eigen_direction(&vals, kp.value()));
    let dm = normalized(&vals, eigen_direction(&vals, km.value()));
    let reference = match field {
        DirectionField::Aligned => [1.0, 0.0],
        DirectionField::Reference(r) => r,
    };
    let (cp, cm) = (metric_dot(&vals, dp, reference), metric_dot(&vals, dm, reference));
    let (k1, mut e1, k2, mut e2) = if cp.abs() >= cm.abs() { (kp, dp, km, dm) } else { (km, dm, kp, dp) };
    if metric_dot(&vals, e1, reference) < 0.0 {
        e1 = [-e1[0], -e1[1]];
    }
    let second = match field {
        DirectionField::Aligned => [0.0, 1.0],
        // the reference rotated by a quarter turn in parameter space
        DirectionField::Reference(r) => [-r[1], r[0]],
    };
    if metric_dot(&vals, e2, second) < 0.0 {
        e2 = [-e2[0], -e2[1]];
    }
    let grad = |j: &Jet2| -> Result<[f64; 2], Error> { Ok([j.partial(1, 0)?, j.partial(0, 1)?]) };
    let (g1, g2) = (grad(&k1)?, grad(&k2)?);
    Ok(PrincipalFrame {
        k1: k1.value(),
        k2: k2.value(),
        e1,
        e2,
        dk1_e1: g1[0] * e1[0] + g1[1] * e1[1],
        dk2_e2: g2[0] * e2[0] + g2[1] * e2[1],
        area_element: libm::sqrt(vals.e * vals.g - vals.f * vals.f),
    })
}

impl PrincipalFrame {
    /// `dk1(e1) dk2(e2) / (k1 − k2)²`, a density with respect to area.
    pub fn density(&self) -> f64 {
        let gap = self.k1 - self.k2;
        self.dk1_e1 * self.dk2_e2 / (gap * gap)
    }
}

pub fn invariant_density(p: &ImmersionPatch, u: f64, v: f64, field: DirectionField) -> Result<f64, Error> {
    let geo = surface::local_geometry(p, u, v, 3)?;
    Ok(principal_frame(&geo.forms, (u, v), field)?.density())
}

/// Energy from the invariant density, `∫ density · √(EG − F²) du dv`.
pub fn invariant_energy(p: &ImmersionPatch, domain: &Domain, nu: usize, nv: usize, field: DirectionField) -> Result<f64, Error> {
    if domain.area() == 0.0 || nu == 0 || nv == 0 {
        return Ok(0.0);
    }
    TensorRule::new(domain, nu, nv).integrate(|u, v| {
        let geo = surface::local_geometry(p, u, v, 3)?;
        let frame = principal_frame(&geo.forms, (u, v), field)?;
        Ok(frame.density() * frame.area_element)
    })
}

/// Direction field on a grid: `e1` propagated from the base corner, each
/// point choosing the principal direction nearest to its predecessor's.
/// Rows are swept in `u`; each row starts from the point below it.
pub fn propagated_directions(p: &ImmersionPatch, grid: &Grid) -> Result<Vec<[f64; 2]>, Error> {
    let mut out: Vec<[f64; 2]> = Vec::with_capacity(grid.len());
    for (i, j, u, v) in grid.points() {
        let reference = if i > 0 {
            out[out.len() - 1]
        } else if j > 0 {
            out[out.len() - grid.nx]
        } else {
            [1.0, 0.0]
        };
        let geo = surface::local_geometry(p, u, v, 3)?;
        let frame = principal_frame(&geo.forms, (u, v), DirectionField::Reference(reference))?;
        out.push(frame.e1);
    }
    Ok(out)
}

/// Which principal curvature is constant along its own direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    K1AlongU,
    K2AlongV,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelCheck {
    pub channel: bool,
    pub which: ChannelKind,
    pub max_k1_u: f64,
    pub max_k2_v: f64,
    pub scale: f64,
}

/// Channel test: `max |k1_u|` or `max |k2_v|` below `tol` times the largest
/// curvature scale on the grid.
pub fn is_channel(p: &ImmersionPatch, grid: &Grid, tol: f64) -> Result<ChannelCheck, Error> {
    let (mut a, mut b, mut scale) = (0.0f64, 0.0f64, 0.0f64);
    for (_, _, u, v) in grid.points() {
        let c = curvature_data(p, u, v, UMBILIC_TOL)?;
        a = a.max(c.k1_u.abs());
        b = b.max(c.k2_v.abs());
        scale = scale.max(c.scale());
    }
    let which = if a <= tol * scale {
        ChannelKind::K1AlongU
    } else if b <= tol * scale {
        ChannelKind::K2AlongV
    } else {
        ChannelKind::None
    };
    Ok(ChannelCheck { channel: which != ChannelKind::None, which, max_k1_u: a, max_k2_v: b, scale })
}

/// `(log |k1 − k2|)_uv`.
pub fn log_gap_uv(c: &CurvatureData) -> f64 {
    let d = c.k1 - c.k2;
    let (du, dv, duv) = (c.k1_u - c.k2_u, c.k1_v - c.k2_v, c.k1_uv - c.k2_uv);
    duv / d - du * dv / (d * d)
}

/// `(log |k1 − k2|)_uv − 4 H_u H_v / (k1 − k2)²`, which vanishes wherever both
/// Euler–Lagrange equations hold.
pub fn log_gap_residual(c: &CurvatureData) -> f64 {
    let d = c.k1 - c.k2;
    let hu = 0.5 * (c.k1_u + c.k2_u);
    let hv = 0.5 * (c.k1_v + c.k2_v);
    log_gap_uv(c) - 4.0 * hu * hv / (d * d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rotational::{builtin_fixture, Params};

    fn fixture(name: &str) -> ImmersionPatch {
        builtin_fixture(name, &Params::new()).unwrap()
    }

    fn synthetic(k1: f64, k2: f64, d1: [f64; 3], d2: [f64; 3]) -> CurvatureData {
        CurvatureData {
            u: 0.0,
            v: 0.0,
            k1,
            k2,
            h: 0.5 * (k1 + k2),
            k: k1 * k2,
            e1: [1.0, 0.0],
            e2: [0.0, 1.0],
            k1_u: d1[0],
            k1_v: d1[1],
            k1_uv: d1[2],
            k2_u: d2[0],
            k2_v: d2[1],
            k2_uv: d2[2],
        }
    }

    #[test]
    fn log_gap_vanishes_on_euler_lagrange_data() {
        let c = synthetic(3.0, 1.0, [1.0, 2.0, 2.0], [0.5, 1.0, -0.5]);
        let r = el_residuals(&c);
        assert_eq!((r.r1, r.r2), (0.0, 0.0));
        assert!(log_gap_residual(&c).abs() < 1e-15);
        assert!((log_gap_uv(&c) - 1.125).abs() < 1e-15);
    }

    #[test]
    fn enneper_residual_closed_form() {
        let p = fixture("enneper");
        let (u, v) = (1.0, 1.0);
        let r = el_residuals(&curvature_data(&p, u, v, UMBILIC_TOL).unwrap());
        assert!((r.r1 + 64.0 / 729.0).abs() < 1e-12, "{}", r.r1);
        // k2 = -k1 makes both equations coincide
        assert!((r.r2 - r.r1).abs() < 1e-12);
        assert!(log_gap_residual(&curvature_data(&p, 0.5, 0.3, UMBILIC_TOL).unwrap()).abs() > 0.1);
    }

    #[test]
    fn rotational_fixtures_are_critical() {
        for name in ["cylinder", "catenoid", "torus", "unduloid"] {
            let p = fixture(name);
            let g = Grid::new(9, 9, p.domain);
            let s = el_summary(&p, &g, UMBILIC_TOL).unwrap();
            assert!(s.max_normalized <= 1e-12, "{name}: {}", s.max_normalized);
            assert!(lie_energy(&p, &Grid::new(8, 8, p.domain)).unwrap().abs() <= 1e-12);
        }
    }

    #[test]
    fn degenerate_domain_has_zero_energy() {
        let p = fixture("enneper");
        let d = Domain::new(0.3, 0.3, 0.2, 0.2).unwrap();
        assert_eq!(lie_energy(&p, &Grid::new(8, 8, d)).unwrap(), 0.0);
    }

    #[test]
    fn enneper_quarter_energy_is_log_three_quarters() {
        let p = fixture("enneper");
        let d = Domain::new(0.0, 1.0, 0.0, 1.0).unwrap();
        let e = lie_energy_on(&p, &d, 32, 32).unwrap();
        assert!((e - libm::log(0.75)).abs() < 1e-10, "{e}");
    }

    #[test]
    fn density_matches_coordinate_integrand() {
        let p = fixture("enneper");
        let (u, v) = (0.5, 0.5);
        let c = curvature_data(&p, u, v, UMBILIC_TOL).unwrap();
        let ff = surface::fundamental_forms(&p, u, v).unwrap();
        let d = invariant_density(&p, u, v, DirectionField::Aligned).unwrap();
        assert!((d * libm::sqrt(ff.e * ff.g) - lie_integrand(&c)).abs() < 1e-12);
        for name in ["catenoid", "torus"] {
            assert!(invariant_density(&fixture(name), 0.7, 0.3, DirectionField::Aligned).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn density_in_rotated_coordinates() {
        // Enneper rotated by 30° in the parameter plane is no longer curvature-line
        let base = fixture("enneper");
        let (c, s) = (libm::cos(core::f64::consts::FRAC_PI_6), libm::sin(core::f64::consts::FRAC_PI_6));
        let rotated = ImmersionPatch::new("rotated", base.sf, Domain::new(-0.5, 0.5, -0.5, 0.5).unwrap(), move |a, b, o| {
            let (aj, bj) = (Jet2::var_u(a, o), Jet2::var_v(b, o));
            let (u, v) = (aj * c - bj * s, aj * s + bj * c);
            let x = u - u * u * u / 3.0 + u * v * v;
            let y = -(v - v * v * v / 3.0 + v * u * u);
            Ok([x, y, u * u - v * v, Jet2::constant(1.0, o)])
        });
        let (a, b) = (0.2, -0.1);
        let (u, v) = (a * c - b * s, a * s + b * c);
        let direct = invariant_density(&base, u, v, DirectionField::Aligned).unwrap();
        let turned = invariant_density(&rotated, a, b, DirectionField::Reference([c, -s])).unwrap();
        assert!((direct - turned).abs() < 1e-12, "{direct} {turned}");
    }

    #[test]
    fn channel_classification() {
        let t = fixture("torus");
        let g = Grid::new(9, 9, t.domain);
        let tc = is_channel(&t, &g, 1e-10).unwrap();
        // k1 depends on v alone and k2 is constant: both tests pass
        assert!(tc.channel && tc.max_k1_u < 1e-12 && tc.max_k2_v < 1e-12);
        let c = fixture("catenoid");
        assert_eq!(is_channel(&c, &Grid::new(9, 9, c.domain), 1e-10).unwrap().which, ChannelKind::K1AlongU);
        let e = fixture("enneper");
        assert!(!is_channel(&e, &Grid::new(9, 9, e.domain), 1e-10).unwrap().channel);
    }
}
