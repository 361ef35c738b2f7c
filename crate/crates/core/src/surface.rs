//! Immersion patches, fundamental forms, principal curvatures and the structure
//! equations, all evaluated through exact Taylor jets.
//!
//! Normal orientation: `n` is chosen so that the ambient frame `(X, X_u, X_v, n)`
//! is positively oriented. In `R³` this is `n ∝ X_v × X_u`; it makes the rotational
//! curvature formulas `k1 = h'/r²`, `k2 = (r'h'' − h'r'')/r³` hold with their signs
//! (the unit cylinder has `k1 = +1` and an inward normal).

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::Error;
use crate::grid::{Domain, Grid};
use crate::jets::{Jet2, DEFAULT_ORDER};
use crate::spaceform::{values, AmbientVector, JetVector, SpaceForm};

/// Relative tolerance below which `|k1 − k2|` counts as umbilic.
pub const UMBILIC_TOL: f64 = 1e-8;
/// Tolerance of the curvature-line test on `F` and `M`.
pub const CURVATURE_LINE_TOL: f64 = 1e-8;
/// Maximum quadric residual accepted for a patch.
pub const QUADRIC_TOL: f64 = 1e-10;
/// Default length scale `ℓ` of residual normalizations.
pub const LENGTH_SCALE: f64 = 1.0;

/// Map `(u, v, order) ↦` jets of the ambient position.
pub type PatchMap = Arc<dyn Fn(f64, f64, usize) -> Result<JetVector, Error> + Send + Sync>;

/// Facts a patch constructor knows about its surface.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PatchTags {
    pub rotational: bool,
    pub isothermic: bool,
    /// Totally umbilic surfaces (plane, round sphere); only valid for error paths.
    pub umbilic: bool,
}

/// An analytic map from a parameter rectangle into a space form.
#[derive(Clone)]
pub struct ImmersionPatch {
    pub label: String,
    pub sf: SpaceForm,
    pub domain: Domain,
    pub tags: PatchTags,
    map: PatchMap,
}

impl core::fmt::Debug for ImmersionPatch {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ImmersionPatch")
            .field("label", &self.label)
            .field("sf", &self.sf)
            .field("domain", &self.domain)
            .field("tags", &self.tags)
            .finish_non_exhaustive()
    }
}

impl ImmersionPatch {
    pub fn new(
        label: impl Into<String>,
        sf: SpaceForm,
        domain: Domain,
        map: impl Fn(f64, f64, usize) -> Result<JetVector, Error> + Send + Sync + 'static,
    ) -> Self {
        Self { label: label.into(), sf, domain, tags: PatchTags::default(), map: Arc::new(map) }
    }

    pub fn with_tags(mut self, tags: PatchTags) -> Self {
        self.tags = tags;
        self
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Jets of the ambient position at `(u, v)`.
    pub fn eval(&self, u: f64, v: f64, order: usize) -> Result<JetVector, Error> {
        if !self.domain.contains(u, v) {
            return Err(Error::OutOfDomain { u, v });
        }
        (self.map)(u, v, order)
    }

    pub fn point(&self, u: f64, v: f64) -> Result<AmbientVector, Error> {
        Ok(values(&self.eval(u, v, 0)?))
    }

    /// Checks the patch invariants on a grid: the image lies on the quadric and
    /// the tangent vectors are independent.
    pub fn validate(&self, grid: &Grid) -> Result<(), Error> {
        for (_, _, u, v) in grid.points() {
            let x = self.eval(u, v, 1)?;
            let r = self.sf.quadric_residual(&values(&x));
            if !(r.abs() <= QUADRIC_TOL) {
                return Err(Error::InvalidParameter {
                    name: self.label.clone(),
                    reason: alloc::format!("quadric residual {r:e} at ({u}, {v})"),
                });
            }
            let xu: AmbientVector = core::array::from_fn(|i| x[i].coeff(1, 0));
            let xv: AmbientVector = core::array::from_fn(|i| x[i].coeff(0, 1));
            let (e, f, g) = (self.sf.inner(&xu, &xu), self.sf.inner(&xu, &xv), self.sf.inner(&xv, &xv));
            let det = e * g - f * f;
            if !(det > 1e-14 * (e * g).max(f64::MIN_POSITIVE)) || !(e > 0.0) {
                return Err(Error::DegenerateMetric { u, v, det });
            }
        }
        Ok(())
    }

    /// The same surface with `u` and `v` exchanged. The normal flips with the
    /// frame handedness.
    pub fn swap_parameters(&self) -> Self {
        let base = self.clone();
        let d = self.domain;
        let mut out = Self::new(
            alloc::format!("{} (swapped)", self.label),
            self.sf,
            Domain { u0: d.v0, u1: d.v1, v0: d.u0, v1: d.u1 },
            move |s, t, order| {
                let x = base.eval(t, s, order)?;
                Ok(core::array::from_fn(|i| x[i].swap_variables()))
            },
        );
        out.tags = self.tags;
        out
    }

    /// The surface reparametrized by `u = a s + b`, `v = c t + d` with `a, c > 0`.
    pub fn reparametrize_affine(&self, a: f64, b: f64, c: f64, d: f64) -> Result<Self, Error> {
        if !(a > 0.0 && c > 0.0) {
            return Err(Error::InvalidParameter {
                name: "scale".into(),
                reason: "affine reparametrization must preserve orientation".into(),
            });
        }
        let base = self.clone();
        let dom = self.domain;
        let domain = Domain::new((dom.u0 - b) / a, (dom.u1 - b) / a, (dom.v0 - d) / c, (dom.v1 - d) / c)?;
        let mut out = Self::new(alloc::format!("{} (reparametrized)", self.label), self.sf, domain, move |s, t, order| {
            let x = base.eval(a * s + b, c * t + d, order)?;
            Ok(core::array::from_fn(|i| x[i].scale_variables(a, c)))
        });
        out.tags = self.tags;
        Ok(out)
    }
}

/// Values of the first and second fundamental forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalForms {
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub l: f64,
    pub m: f64,
    pub n: f64,
}

impl FundamentalForms {
    /// `|σ|` for the metric `e^{2σ} = E` in isothermic coordinates.
    pub fn sigma(&self) -> f64 {
        0.5 * libm::log(self.e)
    }
}

/// Jets of the fundamental forms. With a patch evaluated at order `N`, the first
/// form carries order `N − 1` and the second form order `N − 2`.
#[derive(Debug, Clone, Copy)]
pub struct FormJets {
    pub e: Jet2,
    pub f: Jet2,
    pub g: Jet2,
    pub l: Jet2,
    pub m: Jet2,
    pub n: Jet2,
}

impl FormJets {
    pub fn values(&self) -> FundamentalForms {
        FundamentalForms {
            e: self.e.value(),
            f: self.f.value(),
            g: self.g.value(),
            l: self.l.value(),
            m: self.m.value(),
            n: self.n.value(),
        }
    }

    /// Scales `L` and `N` independently; used to build inconsistent data for
    /// control experiments on the structure equations.
    pub fn scale_second_form(mut self, l_factor: f64, n_factor: f64) -> Self {
        self.l = self.l * l_factor;
        self.n = self.n * n_factor;
        self
    }

    /// Mean and Gauss curvature jets in arbitrary coordinates.
    pub fn mean_gauss(&self) -> (Jet2, Jet2) {
        let det = self.e * self.g - self.f * self.f;
        let h = (self.e * self.n + self.g * self.l - self.f * self.m * 2.0) / (det * 2.0);
        let k = (self.l * self.n - self.m * self.m) / det;
        (h, k)
    }
}

/// Local geometry at one parameter point.
#[derive(Debug, Clone, Copy)]
pub struct LocalGeometry {
    pub position: JetVector,
    pub normal: JetVector,
    pub forms: FormJets,
}

fn cross3(a: &JetVector, b: &JetVector) -> [Jet2; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn det3(a: [Jet2; 3], b: [Jet2; 3], c: [Jet2; 3]) -> Jet2 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])
}

fn d_du(x: &JetVector) -> JetVector {
    core::array::from_fn(|i| x[i].d_du())
}

fn d_dv(x: &JetVector) -> JetVector {
    core::array::from_fn(|i| x[i].d_dv())
}

/// Unit normal jets of the frame `(x, xu, xv)`, oriented so that
/// `det[X, X_u, X_v, n] > 0`.
pub fn normal_from_frame(sf: SpaceForm, x: &JetVector, xu: &JetVector, xv: &JetVector, at: (f64, f64)) -> Result<JetVector, Error> {
    let order = xu[0].order().min(xv[0].order());
    let scale = (sf.inner(&values(xu), &values(xu)) * sf.inner(&values(xv), &values(xv))).abs();
    let (raw, norm2) = match sf {
        SpaceForm::Euclidean => {
            let c = cross3(xv, xu);
            let norm2 = c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
            ([c[0], c[1], c[2], Jet2::zero(order)], norm2)
        }
        _ => {
            let x = core::array::from_fn::<Jet2, 4, _>(|i| x[i].truncate(order));
            let rows = |skip: usize| -> [[Jet2; 3]; 3] {
                let mut out = [[Jet2::zero(order); 3]; 3];
                for (r, i) in (0..4).filter(|&i| i != skip).enumerate() {
                    out[r] = [x[i], xu[i], xv[i]];
                }
                out
            };
            let sig = sf.signature();
            let w: [Jet2; 4] = core::array::from_fn(|i| {
                let m = rows(i);
                let minor = det3([m[0][0], m[1][0], m[2][0]], [m[0][1], m[1][1], m[2][1]], [m[0][2], m[1][2], m[2][2]]);
                // cofactor sign of entry (i, 3) in a 4×4 determinant
                let sign = if i % 2 == 0 { -1.0 } else { 1.0 };
                minor * (sign * sig[i])
            });
            let norm2 = sf.inner_jet(&w, &w);
            (w, norm2)
        }
    };
    if !(norm2.value() > 1e-24 * scale.max(f64::MIN_POSITIVE)) {
        return Err(Error::DegenerateFrame { u: at.0, v: at.1 });
    }
    let inv = norm2.sqrt().recip();
    Ok(core::array::from_fn(|i| raw[i] * inv))
}

/// Position, normal and fundamental-form jets from a patch evaluated at `order ≥ 2`.
pub fn local_geometry(p: &ImmersionPatch, u: f64, v: f64, order: usize) -> Result<LocalGeometry, Error> {
    let x = p.eval(u, v, order)?;
    geometry_from_position(p.sf, x, (u, v))
}

pub(crate) fn geometry_from_position(sf: SpaceForm, x: JetVector, at: (f64, f64)) -> Result<LocalGeometry, Error> {
    let xu = d_du(&x);
    let xv = d_dv(&x);
    let xuu = d_du(&xu);
    let xuv = d_dv(&xu);
    let xvv = d_dv(&xv);
    let n = normal_from_frame(sf, &x, &xu, &xv, at)?;
    let forms = FormJets {
        e: sf.inner_jet(&xu, &xu),
        f: sf.inner_jet(&xu, &xv),
        g: sf.inner_jet(&xv, &xv),
        l: sf.inner_jet(&xuu, &n),
        m: sf.inner_jet(&xuv, &n),
        n: sf.inner_jet(&xvv, &n),
    };
    let det = forms.e.value() * forms.g.value() - forms.f.value() * forms.f.value();
    if !(det > 0.0) || !(forms.e.value() > 0.0) || !(forms.g.value() > 0.0) {
        return Err(Error::DegenerateMetric { u: at.0, v: at.1, det });
    }
    Ok(LocalGeometry { position: x, normal: n, forms })
}

pub fn fundamental_forms(p: &ImmersionPatch, u: f64, v: f64) -> Result<FundamentalForms, Error> {
    Ok(local_geometry(p, u, v, 2)?.forms.values())
}

/// Unit normal jets at `(u, v)` (order of the patch evaluation minus one).
pub fn unit_normal(p: &ImmersionPatch, u: f64, v: f64) -> Result<JetVector, Error> {
    Ok(local_geometry(p, u, v, DEFAULT_ORDER)?.normal)
}

/// Curvature scale `|k1| + |k2| + 1/ℓ` used to make tolerances dimensionless.
pub fn curvature_scale(k1: f64, k2: f64) -> f64 {
    k1.abs() + k2.abs() + 1.0 / LENGTH_SCALE
}

/// Defects of the curvature-line and conformality conditions at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignmentDefects {
    /// `|F| / √(EG)`
    pub f: f64,
    /// `|M| / √(EG)`, divided by the curvature scale
    pub m: f64,
    /// `|E − G| / E`
    pub conformal: f64,
}

impl AlignmentDefects {
    pub fn of(forms: &FundamentalForms) -> Self {
        let root = libm::sqrt(forms.e * forms.g);
        let scale = (forms.l / forms.e).abs() + (forms.n / forms.g).abs() + 1.0 / LENGTH_SCALE;
        Self { f: forms.f.abs() / root, m: forms.m.abs() / root / scale, conformal: (forms.e - forms.g).abs() / forms.e }
    }

    pub fn curvature_line(&self) -> f64 {
        self.f.max(self.m)
    }
}

/// Principal curvatures at a point with all partials needed by the
/// Euler–Lagrange equations. `k1` is the curvature of the `u`-direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureData {
    pub u: f64,
    pub v: f64,
    pub k1: f64,
    pub k2: f64,
    pub h: f64,
    pub k: f64,
    /// Unit principal directions as coefficients on `(∂u, ∂v)`.
    pub e1: [f64; 2],
    pub e2: [f64; 2],
    pub k1_u: f64,
    pub k1_v: f64,
    pub k2_u: f64,
    pub k2_v: f64,
    pub k1_uv: f64,
    pub k2_uv: f64,
}

impl CurvatureData {
    pub fn scale(&self) -> f64 {
        curvature_scale(self.k1, self.k2)
    }
}

/// Principal curvature jets `(L/E, N/G)` in curvature-line coordinates after
/// checking alignment and umbilicity at the expansion point.
pub fn principal_jets(forms: &FormJets, at: (f64, f64), tol_umb: f64, tol_line: f64) -> Result<(Jet2, Jet2), Error> {
    let vals = forms.values();
    let defects = AlignmentDefects::of(&vals);
    if !(defects.curvature_line() <= tol_line) {
        return Err(Error::NotCurvatureLine { u: at.0, v: at.1, defect: defects.curvature_line() });
    }
    let k1 = forms.l / forms.e;
    let k2 = forms.n / forms.g;
    let (a, b) = (k1.value(), k2.value());
    if !((a - b).abs() > tol_umb * curvature_scale(a, b)) {
        return Err(Error::UmbilicPoint { u: at.0, v: at.1, k1: a, k2: b });
    }
    Ok((k1, k2))
}

pub fn curvature_data(p: &ImmersionPatch, u: f64, v: f64, tol_umb: f64) -> Result<CurvatureData, Error> {
    curvature_data_with(p, u, v, tol_umb, CURVATURE_LINE_TOL)
}

pub fn curvature_data_with(p: &ImmersionPatch, u: f64, v: f64, tol_umb: f64, tol_line: f64) -> Result<CurvatureData, Error> {
    let geo = local_geometry(p, u, v, DEFAULT_ORDER)?;
    curvature_from_forms(&geo.forms, (u, v), tol_umb, tol_line)
}

pub fn curvature_from_forms(forms: &FormJets, at: (f64, f64), tol_umb: f64, tol_line: f64) -> Result<CurvatureData, Error> {
    let (k1, k2) = principal_jets(forms, at, tol_umb, tol_line)?;
    let vals = forms.values();
    let part = |j: &Jet2, a, b| j.partial(a, b).map_err(Error::from);
    Ok(CurvatureData {
        u: at.0,
        v: at.1,
        k1: k1.value(),
        k2: k2.value(),
        h: 0.5 * (k1.value() + k2.value()),
        k: k1.value() * k2.value(),
        e1: [1.0 / libm::sqrt(vals.e), 0.0],
        e2: [0.0, 1.0 / libm::sqrt(vals.g)],
        k1_u: part(&k1, 1, 0)?,
        k1_v: part(&k1, 0, 1)?,
        k2_u: part(&k2, 1, 0)?,
        k2_v: part(&k2, 0, 1)?,
        k1_uv: part(&k1, 1, 1)?,
        k2_uv: part(&k2, 1, 1)?,
    })
}

/// Outcome of [`check_coordinates`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordinateCheck {
    pub curvature_line: bool,
    pub isothermic: bool,
    pub max_f: f64,
    pub max_m: f64,
    pub max_conf_defect: f64,
}

pub fn check_coordinates(p: &ImmersionPatch, grid: &Grid, tol: f64) -> Result<CoordinateCheck, Error> {
    let mut out = CoordinateCheck { curvature_line: true, isothermic: true, max_f: 0.0, max_m: 0.0, max_conf_defect: 0.0 };
    for (_, _, u, v) in grid.points() {
        let d = AlignmentDefects::of(&fundamental_forms(p, u, v)?);
        out.max_f = out.max_f.max(d.f);
        out.max_m = out.max_m.max(d.m);
        out.max_conf_defect = out.max_conf_defect.max(d.conformal);
    }
    out.curvature_line = out.max_f.max(out.max_m) <= tol;
    out.isothermic = out.curvature_line && out.max_conf_defect <= tol;
    Ok(out)
}

/// Codazzi residuals `k1_v/(k2−k1) − (log√E)_v` and `k2_u/(k1−k2) − (log√G)_u`,
/// raw and divided by `1/ℓ` plus the magnitudes of the two balanced terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodazziResidual {
    pub r1: f64,
    pub r2: f64,
    pub r1_scaled: f64,
    pub r2_scaled: f64,
}

impl CodazziResidual {
    pub fn max_scaled(&self) -> f64 {
        self.r1_scaled.abs().max(self.r2_scaled.abs())
    }
}

pub fn codazzi_residual(p: &ImmersionPatch, u: f64, v: f64) -> Result<CodazziResidual, Error> {
    let geo = local_geometry(p, u, v, 3)?;
    codazzi_from_forms(&geo.forms, (u, v))
}

pub fn codazzi_from_forms(forms: &FormJets, at: (f64, f64)) -> Result<CodazziResidual, Error> {
    let (k1, k2) = principal_jets(forms, at, UMBILIC_TOL, CURVATURE_LINE_TOL)?;
    let (k1v, k2u) = (k1.partial(0, 1)?, k2.partial(1, 0)?);
    let (e, g) = (forms.e.value(), forms.g.value());
    let lhs1 = k1v / (k2.value() - k1.value());
    let rhs1 = forms.e.partial(0, 1)? / (2.0 * e);
    let lhs2 = k2u / (k1.value() - k2.value());
    let rhs2 = forms.g.partial(1, 0)? / (2.0 * g);
    let (r1, r2) = (lhs1 - rhs1, lhs2 - rhs2);
    Ok(CodazziResidual {
        r1,
        r2,
        r1_scaled: r1 / (1.0 / LENGTH_SCALE + lhs1.abs() + rhs1.abs()),
        r2_scaled: r2 / (1.0 / LENGTH_SCALE + lhs2.abs() + rhs2.abs()),
    })
}

/// Gauss residual `σ_uu + σ_vv + (κ + K) e^{2σ}` in isothermic coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussResidual {
    pub value: f64,
    pub scaled: f64,
}

pub fn gauss_residual(p: &ImmersionPatch, u: f64, v: f64) -> Result<GaussResidual, Error> {
    gauss_residual_with(p, u, v, CURVATURE_LINE_TOL)
}

pub fn gauss_residual_with(p: &ImmersionPatch, u: f64, v: f64, tol: f64) -> Result<GaussResidual, Error> {
    let geo = local_geometry(p, u, v, 3)?;
    gauss_from_forms(&geo.forms, p.sf.kappa(), (u, v), tol)
}

pub fn gauss_from_forms(forms: &FormJets, kappa: f64, at: (f64, f64), tol: f64) -> Result<GaussResidual, Error> {
    let d = AlignmentDefects::of(&forms.values());
    if !(d.curvature_line() <= tol && d.conformal <= tol) {
        return Err(Error::NotIsothermic { u: at.0, v: at.1, defect: d.conformal.max(d.curvature_line()) });
    }
    let sigma = forms.e.try_ln()? * 0.5;
    let (_, k) = forms.mean_gauss();
    let s_uu = sigma.partial(2, 0)?;
    let s_vv = sigma.partial(0, 2)?;
    let curv = (kappa + k.value()) * forms.e.value();
    let value = s_uu + s_vv + curv;
    Ok(GaussResidual { value, scaled: value / (1.0 + s_uu.abs() + s_vv.abs() + curv.abs()) })
}

/// Grid sweep of curvature data; fails on the first invalid point.
pub fn curvature_grid(p: &ImmersionPatch, grid: &Grid, tol_umb: f64) -> Result<Vec<CurvatureData>, Error> {
    grid.points().map(|(_, _, u, v)| curvature_data(p, u, v, tol_umb)).collect()
}
