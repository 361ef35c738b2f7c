//! Rotational surfaces `X(u, v) = ρ(u)(r(v), 0, h(v), k(v))`, their profile
//! curves, the built-in fixture catalogue, Delaunay profiles and the
//! reconstruction of rotational surfaces from channel data.
//!
//! Profiles are evaluated as univariate Taylor series in the `v` slot of a
//! [`Jet2`]; composing with a parameter jet gives exact derivatives.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::grid::Domain;
use crate::jets::{Jet2, MAX_ORDER};
use crate::ode::{self, ODE_TOL};
use crate::quadrature::integrate_1d;
use crate::spaceform::{JetVector, SpaceForm};
use crate::spline::CubicSpline;
use crate::surface::{self, ImmersionPatch, PatchTags};

/// Relative tolerance of the isothermic normalization `⟨γ', γ'⟩ = r²`.
pub const NORMALIZATION_TOL: f64 = 1e-8;
/// Radius below which a Delaunay profile is considered collapsed onto the axis.
pub const NECK_TOL: f64 = 1e-8;

/// Taylor series of `(r, h, k)` at a profile parameter, as `v`-series jets.
pub type SeriesFn = Arc<dyn Fn(f64, usize) -> Result<[Jet2; 3], Error> + Send + Sync>;

/// Generating curve `γ = (r, 0, h, k)` of a rotational surface.
#[derive(Clone)]
pub struct ProfileCurve {
    pub label: String,
    pub sf: SpaceForm,
    pub span: (f64, f64),
    /// Whether `⟨γ', γ'⟩ = r²` holds (isothermic rotational coordinates).
    pub isothermic: bool,
    series: SeriesFn,
}

impl core::fmt::Debug for ProfileCurve {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ProfileCurve")
            .field("label", &self.label)
            .field("sf", &self.sf)
            .field("span", &self.span)
            .field("isothermic", &self.isothermic)
            .finish_non_exhaustive()
    }
}

fn signed_norm2(sf: SpaceForm, d: &[Jet2; 3]) -> Jet2 {
    let sig = sf.signature();
    match sf {
        SpaceForm::Euclidean => d[0] * d[0] + d[1] * d[1],
        _ => d[0] * d[0] + d[1] * d[1] + d[2] * d[2] * sig[3],
    }
}

impl ProfileCurve {
    pub fn from_series(
        label: impl Into<String>,
        sf: SpaceForm,
        span: (f64, f64),
        isothermic: bool,
        series: impl Fn(f64, usize) -> Result<[Jet2; 3], Error> + Send + Sync + 'static,
    ) -> Self {
        Self { label: label.into(), sf, span, isothermic, series: Arc::new(series) }
    }

    /// Profile given by a closed form evaluated on jets. For `κ = 0` the third
    /// component is ignored.
    pub fn analytic(
        label: impl Into<String>,
        sf: SpaceForm,
        span: (f64, f64),
        isothermic: bool,
        f: impl Fn(&Jet2) -> [Jet2; 3] + Send + Sync + 'static,
    ) -> Self {
        Self::from_series(label, sf, span, isothermic, move |s, order| Ok(f(&Jet2::var_v(s, order))))
    }

    fn contains(&self, s: f64) -> bool {
        let slack = 1e-12 * (1.0 + self.span.0.abs().max(self.span.1.abs()));
        s >= self.span.0 - slack && s <= self.span.1 + slack
    }

    /// `v`-series jets of `(r, h, k)` at parameter `s`.
    pub fn series_at(&self, s: f64, order: usize) -> Result<[Jet2; 3], Error> {
        if !self.contains(s) {
            return Err(Error::OutOfDomain { u: f64::NAN, v: s });
        }
        let g = (self.series)(s, order)?;
        if !(g[0].value() > 0.0) {
            return Err(Error::NonPositiveRadius { v: s, r: g[0].value() });
        }
        Ok(g)
    }

    /// `(r, h, k)` composed with a parameter jet.
    pub fn eval(&self, t: &Jet2) -> Result<[Jet2; 3], Error> {
        let g = self.series_at(t.value(), t.order())?;
        Ok(core::array::from_fn(|i| t.compose(&g[i].v_series()[..=t.order()])))
    }

    pub fn value(&self, s: f64) -> Result<[f64; 3], Error> {
        let g = self.series_at(s, 0)?;
        Ok([g[0].value(), g[1].value(), g[2].value()])
    }

    /// `|⟨γ', γ'⟩ − r²| / r²`.
    pub fn normalization_defect(&self, s: f64) -> Result<f64, Error> {
        let g = self.series_at(s, 1)?;
        let d: [Jet2; 3] = core::array::from_fn(|i| g[i].d_dv());
        let r2 = g[0].value() * g[0].value();
        Ok((signed_norm2(self.sf, &d).value() - r2).abs() / r2)
    }

    /// The same curve in the isothermic parameter `v` with `dv/ds = |γ_s|/r`,
    /// `v = 0` at the start of the span.
    pub fn isothermic_reparametrization(&self) -> Result<Self, Error> {
        if self.isothermic {
            return Ok(self.clone());
        }
        let base = self.clone();
        let speed = move |s: f64| -> Result<f64, Error> {
            let g = base.series_at(s, 1)?;
            let d: [Jet2; 3] = core::array::from_fn(|i| g[i].d_dv());
            let n2 = signed_norm2(base.sf, &d).value();
            if !(n2 > 0.0) {
                return Err(Error::DegenerateFrame { u: f64::NAN, v: s });
            }
            Ok(libm::sqrt(n2) / g[0].value())
        };
        let checkpoints = ode::integrate(|s, _| Ok([speed(s)?]), self.span.0, [0.0], self.span.1, ODE_TOL)?;
        let table: Vec<(f64, f64)> = checkpoints.iter().map(|(s, v)| (v[0], *s)).collect();
        let v_end = table[table.len() - 1].0;
        let base = self.clone();
        let sf = self.sf;
        Ok(Self::from_series(alloc::format!("{} (isothermic)", self.label), self.sf, (0.0, v_end), true, move |v, order| {
            let i = table.partition_point(|&(vi, _)| vi <= v).saturating_sub(1);
            let (vi, si) = table[i];
            let s = ode::solve(|_, s: &[f64; 1]| Ok([1.0 / speed(s[0])?]), vi, [si], v, ODE_TOL)?[0];
            let s = s.clamp(base.span.0, base.span.1);
            // Taylor series of ds/dv = r/|γ_s| at s, in the local variable s − s(v)
            let g = base.series_at(s, order + 1)?;
            let d: [Jet2; 3] = core::array::from_fn(|k| g[k].d_dv());
            let r = g[0].truncate(order);
            let rate = r / signed_norm2(sf, &d).sqrt();
            let rate = rate.v_series();
            let sj = ode::taylor_lift([s], order, |y| [y[0].compose(&rate[..=order])]);
            Ok(core::array::from_fn(|k| sj[0].compose(&g[k].v_series()[..=order])))
        }))
    }
}

/// Rotational patch over `u ∈ [0, 2π]` and the profile span.
pub fn make_rotational(profile: &ProfileCurve, sf: SpaceForm) -> Result<ImmersionPatch, Error> {
    if profile.sf != sf {
        return Err(Error::InvalidParameter { name: "sf".into(), reason: "profile and patch space forms differ".into() });
    }
    let (s0, s1) = profile.span;
    for i in 0..=32 {
        let s = s0 + (s1 - s0) * i as f64 / 32.0;
        profile.value(s)?;
    }
    let domain = Domain::new(0.0, 2.0 * PI, s0, s1)?;
    let prof = profile.clone();
    let patch = ImmersionPatch::new(profile.label.clone(), sf, domain, move |u, v, order| {
        let [r, h, k] = prof.eval(&Jet2::var_v(v, order))?;
        let u = Jet2::var_u(u, order);
        let fourth = match sf {
            SpaceForm::Euclidean => Jet2::constant(1.0, order),
            _ => k,
        };
        let x: JetVector = [r * u.cos(), r * u.sin(), h, fourth];
        Ok(x)
    });
    Ok(patch.with_tags(PatchTags { rotational: true, isothermic: profile.isothermic, umbilic: false }))
}

/// Principal curvatures `(k1, k2)` of the rotational surface from the profile
/// alone: `k1 = (k h' − h k')/r²` along the rotation, `k2 = det[γ, γ', γ'']/r³`
/// along the profile. Requires the isothermic normalization.
pub fn rotational_curvatures(profile: &ProfileCurve, v: f64, sf: SpaceForm) -> Result<(f64, f64), Error> {
    let defect = profile.normalization_defect(v)?;
    if !(defect <= NORMALIZATION_TOL) {
        return Err(Error::NormalizationViolated { v, defect });
    }
    let g = profile.series_at(v, 2)?;
    let d = |j: &Jet2, n| j.partial(0, n).map_err(Error::from);
    let (r, r1, r2) = (g[0].value(), d(&g[0], 1)?, d(&g[0], 2)?);
    let (h, h1, h2) = (g[1].value(), d(&g[1], 1)?, d(&g[1], 2)?);
    let (k, k1, k2) = match sf {
        SpaceForm::Euclidean => (1.0, 0.0, 0.0),
        _ => (g[2].value(), d(&g[2], 1)?, d(&g[2], 2)?),
    };
    let c1 = (k * h1 - h * k1) / (r * r);
    let det = r * (h1 * k2 - h2 * k1) - r1 * (h * k2 - h2 * k) + r2 * (h * k1 - h1 * k);
    Ok((c1, det / (r * r * r)))
}

/// Delaunay profile with mean curvature `H`, starting at a neck or bulge of
/// radius `r0` with vertical tangent.
pub fn delaunay_profile(h_mean: f64, r0: f64, span: (f64, f64)) -> Result<ProfileCurve, Error> {
    delaunay_profile_with(h_mean, r0, FRAC_PI_2, span)
}

/// Delaunay profile integrated directly in the isothermic parameter:
/// `r' = r cos ψ`, `h' = r sin ψ`, `ψ' = 2H r − sin ψ`, from `(r0, 0, ψ0)` at `v = 0`.
/// This is the arclength system `r_s = cos ψ`, `h_s = sin ψ`, `ψ_s = 2H − sin ψ / r`
/// under `ds/dv = r`.
pub fn delaunay_profile_with(h_mean: f64, r0: f64, psi0: f64, span: (f64, f64)) -> Result<ProfileCurve, Error> {
    if !(r0 > 0.0) {
        return Err(Error::NonPositiveRadius { v: 0.0, r: r0 });
    }
    if !(span.0 <= 0.0 && span.1 >= 0.0 && span.0 < span.1) {
        return Err(Error::InvalidParameter { name: "span".into(), reason: "must contain 0 in its interior".into() });
    }
    let field = move |_: f64, y: &[f64; 3]| -> Result<[f64; 3], Error> {
        let (s, c) = (libm::sin(y[2]), libm::cos(y[2]));
        Ok([y[0] * c, y[0] * s, 2.0 * h_mean * y[0] - s])
    };
    let y0 = [r0, 0.0, psi0];
    let forward = ode::integrate(field, 0.0, y0, span.1, ODE_TOL)?;
    let backward = ode::integrate(field, 0.0, y0, span.0, ODE_TOL)?;
    for &(v, y) in forward.iter().chain(&backward) {
        if !(y[0] > NECK_TOL) {
            return Err(Error::NeckCollapse { v, r: y[0] });
        }
    }
    let forward: Arc<[(f64, [f64; 3])]> = forward.into();
    let backward: Arc<[(f64, [f64; 3])]> = backward.into();
    let label = alloc::format!("delaunay(H={h_mean}, r0={r0})");
    Ok(ProfileCurve::from_series(label, SpaceForm::Euclidean, span, true, move |v, order| {
        let table = if v >= 0.0 { &forward } else { &backward };
        let i = table.partition_point(|&(t, _)| t.abs() <= v.abs()).saturating_sub(1);
        let (t0, y) = table[i];
        let y = ode::solve(field, t0, y, v, ODE_TOL)?;
        let lifted = ode::taylor_lift(y, order, |y| {
            let (s, c) = (y[2].sin(), y[2].cos());
            [y[0] * c, y[0] * s, y[0] * (2.0 * h_mean) - s]
        });
        Ok([lifted[0], lifted[1], Jet2::constant(1.0, order)])
    }))
}

/// Profile `(r(s), s)` with `r` a clamped cubic spline through seeded random
/// radii, renormalized to the isothermic parameter. Control points are
/// redrawn until the surface is umbilic-free with a margin.
pub fn spline_profile(seed: u64) -> Result<ProfileCurve, Error> {
    const KNOTS: usize = 6;
    const SPACING: f64 = 1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<f64> = (0..KNOTS).map(|i| i as f64 * SPACING).collect();
    for _ in 0..1000 {
        let y: Vec<f64> = (0..KNOTS).map(|_| rng.gen_range(0.9..1.2)).collect();
        let slopes = (rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2));
        let spline = CubicSpline::clamped(&x, &y, slopes.0, slopes.1)?;
        if umbilic_margin(&spline) > 0.1 {
            let sp = Arc::new(spline);
            let raw = ProfileCurve::from_series(
                alloc::format!("spline-profile(seed={seed})"),
                SpaceForm::Euclidean,
                sp.span(),
                false,
                move |s, order| {
                    let ser = sp.series(s);
                    let r = Jet2::from_v_series(&ser[..=order.min(MAX_ORDER)], order);
                    Ok([r, Jet2::var_v(s, order), Jet2::constant(1.0, order)])
                },
            );
            let mut iso = raw.isothermic_reparametrization()?;
            iso.label = alloc::format!("spline-profile(seed={seed})");
            return Ok(iso);
        }
    }
    Err(Error::Numerical("no umbilic-free spline profile found"))
}

/// Euclidean profile through tabulated points `(s_i, r_i, h_i)`, interpolated
/// by clamped cubic splines with end slopes from one-sided three-point
/// differences, then renormalized to the isothermic parameter.
pub fn tabulated_profile(label: &str, s: &[f64], r: &[f64], h: &[f64]) -> Result<ProfileCurve, Error> {
    let n = s.len();
    if n < 3 || r.len() != n || h.len() != n {
        return Err(Error::InvalidParameter { name: "profile".into(), reason: "need at least three rows of (s, r, h)".into() });
    }
    if let Some(i) = r.iter().position(|&x| !(x > 0.0)) {
        return Err(Error::NonPositiveRadius { v: s[i], r: r[i] });
    }
    let end_slopes = |y: &[f64]| {
        let (h0, h1) = (s[1] - s[0], s[n - 1] - s[n - 2]);
        let d0 = (y[1] - y[0]) / h0;
        let d1 = (y[n - 1] - y[n - 2]) / h1;
        let d0b = (y[2] - y[1]) / (s[2] - s[1]);
        let d1b = (y[n - 2] - y[n - 3]) / (s[n - 2] - s[n - 3]);
        (d0 + (d0 - d0b) * h0 / (s[2] - s[0]), d1 + (d1 - d1b) * h1 / (s[n - 1] - s[n - 3]))
    };
    let (r0, r1) = end_slopes(r);
    let (h0, h1) = end_slopes(h);
    let rs = Arc::new(CubicSpline::clamped(s, r, r0, r1)?);
    let hs = Arc::new(CubicSpline::clamped(s, h, h0, h1)?);
    let raw = ProfileCurve::from_series(label, SpaceForm::Euclidean, rs.span(), false, move |t, order| {
        let o = order.min(MAX_ORDER);
        Ok([Jet2::from_v_series(&rs.series(t)[..=o], order), Jet2::from_v_series(&hs.series(t)[..=o], order), Jet2::constant(1.0, order)])
    });
    let mut iso = raw.isothermic_reparametrization()?;
    iso.label = label.to_string();
    Ok(iso)
}

/// `min |k1 − k2| / (|k1| + |k2| + 1)` over a dense sample of a graph profile `(r(s), s)`.
fn umbilic_margin(spline: &CubicSpline) -> f64 {
    let (a, b) = spline.span();
    (0..=400)
        .map(|i| {
            let s = spline.series(a + (b - a) * i as f64 / 400.0);
            let (r, r1, r2) = (s[0], s[1], 2.0 * s[2]);
            let speed = libm::sqrt(1.0 + r1 * r1);
            let k_rot = 1.0 / (r * speed);
            let k_prof = -r2 / (speed * speed * speed);
            (k_rot - k_prof).abs() / (k_rot.abs() + k_prof.abs() + 1.0)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Fixture names accepted by [`builtin_fixture`].
pub const FIXTURES: &[&str] = &[
    "plane",
    "cylinder",
    "cone",
    "sphere",
    "catenoid",
    "torus",
    "unduloid",
    "nodoid",
    "enneper",
    "spline-profile",
    "spherical-band",
    "hyperbolic-band",
    "sheared-graph",
];

/// Parameters accepted by a fixture with their defaults.
pub fn fixture_defaults(name: &str) -> Result<&'static [(&'static str, f64)], Error> {
    Ok(match name {
        "cylinder" => &[("a", 1.0)],
        "cone" => &[("alpha", PI / 6.0)],
        "sphere" => &[("R", 1.0)],
        "torus" => &[("R", 2.0), ("r", 0.5)],
        "unduloid" => &[("H", 0.5), ("r0", 0.6)],
        "nodoid" => &[("H", 0.5), ("r0", 2.5)],
        "spline-profile" => &[("seed", 7.0)],
        n if FIXTURES.contains(&n) => &[],
        _ => return Err(Error::UnknownFixture(name.to_string())),
    })
}

/// Parameter table of a fixture.
pub type Params = BTreeMap<String, f64>;

fn param(params: &Params, name: &str, default: f64) -> Result<f64, Error> {
    let value = params.get(name).copied().unwrap_or(default);
    if !value.is_finite() {
        return Err(Error::InvalidParameter { name: name.to_string(), reason: "not finite".into() });
    }
    Ok(value)
}

fn positive(params: &Params, name: &str, default: f64) -> Result<f64, Error> {
    let value = param(params, name, default)?;
    if !(value > 0.0) {
        return Err(Error::InvalidParameter { name: name.to_string(), reason: "must be positive".into() });
    }
    Ok(value)
}

fn euclidean_patch(
    label: &str,
    domain: Domain,
    tags: PatchTags,
    f: impl Fn(Jet2, Jet2) -> [Jet2; 3] + Send + Sync + 'static,
) -> ImmersionPatch {
    ImmersionPatch::new(label, SpaceForm::Euclidean, domain, move |u, v, order| {
        let [x, y, z] = f(Jet2::var_u(u, order), Jet2::var_v(v, order));
        Ok([x, y, z, Jet2::constant(1.0, order)])
    })
    .with_tags(tags)
}

/// Named surface patches with documented parameter defaults:
///
/// | name | parameters | notes |
/// |---|---|---|
/// | `plane` | | `r = e^v`, umbilic |
/// | `cylinder` | `a = 1` | `r = a`, `h = a v` |
/// | `cone` | `alpha = π/6` | half-angle `alpha`, isothermic |
/// | `sphere` | `R = 1` | `r = R sech v`, umbilic |
/// | `catenoid` | | `r = cosh v`, `h = v` |
/// | `torus` | `R = 2`, `r = 0.5` | not isothermic |
/// | `unduloid` | `H = 0.5`, `r0 = 0.6` | Delaunay, `v ∈ [-3, 3]` |
/// | `nodoid` | `H = 0.5`, `r0 = 2.5` | Delaunay |
/// | `enneper` | | `[-1, 1]²` |
/// | `spline-profile` | `seed = 7` | random rotational |
/// | `spherical-band` | | rotational in `S³` |
/// | `hyperbolic-band` | | rotational in `H³` |
/// | `sheared-graph` | | `(u, v, uv)`, not curvature-line |
pub fn builtin_fixture(name: &str, params: &Params) -> Result<ImmersionPatch, Error> {
    let defaults = fixture_defaults(name)?;
    if let Some(key) = params.keys().find(|k| !defaults.iter().any(|(d, _)| d == k)) {
        return Err(Error::InvalidParameter { name: key.clone(), reason: alloc::format!("not a parameter of {name}") });
    }
    let e = SpaceForm::Euclidean;
    let rot = |profile: ProfileCurve, sf| make_rotational(&profile, sf);
    let patch = match name {
        "plane" => {
            let p = ProfileCurve::analytic("plane", e, (-1.0, 1.0), true, |v| {
                let o = v.order();
                [v.exp(), Jet2::zero(o), Jet2::constant(1.0, o)]
            });
            let mut patch = rot(p, e)?;
            patch.tags.umbilic = true;
            patch
        }
        "cylinder" => {
            let a = positive(params, "a", 1.0)?;
            rot(
                ProfileCurve::analytic("cylinder", e, (-1.0, 1.0), true, move |v| {
                    let o = v.order();
                    [Jet2::constant(a, o), *v * a, Jet2::constant(1.0, o)]
                }),
                e,
            )?
        }
        "cone" => {
            let alpha = positive(params, "alpha", PI / 6.0)?;
            if alpha >= FRAC_PI_2 {
                return Err(Error::InvalidParameter { name: "alpha".into(), reason: "must be below π/2".into() });
            }
            let (sa, ca) = (libm::sin(alpha), libm::cos(alpha));
            rot(
                ProfileCurve::analytic("cone", e, (-1.0, 1.0), true, move |v| {
                    let g = (*v * sa).exp();
                    [g * sa, g * ca, Jet2::constant(1.0, v.order())]
                }),
                e,
            )?
        }
        "sphere" => {
            let r = positive(params, "R", 1.0)?;
            let p = ProfileCurve::analytic("sphere", e, (-1.0, 1.0), true, move |v| {
                [v.cosh().recip() * r, (v.sinh() / v.cosh()) * r, Jet2::constant(1.0, v.order())]
            });
            let mut patch = rot(p, e)?;
            patch.tags.umbilic = true;
            patch
        }
        "catenoid" => rot(ProfileCurve::analytic("catenoid", e, (-1.0, 1.0), true, |v| [v.cosh(), *v, Jet2::constant(1.0, v.order())]), e)?,
        "torus" => {
            let big = positive(params, "R", 2.0)?;
            let small = positive(params, "r", 0.5)?;
            if small >= big {
                return Err(Error::InvalidParameter { name: "r".into(), reason: "must be below R".into() });
            }
            rot(
                ProfileCurve::analytic("torus", e, (-PI, PI), false, move |v| {
                    [v.cos() * small + big, v.sin() * small, Jet2::constant(1.0, v.order())]
                }),
                e,
            )?
        }
        "unduloid" | "nodoid" => {
            let h = param(params, "H", 0.5)?;
            let r0 = positive(params, "r0", if name == "unduloid" { 0.6 } else { 2.5 })?;
            let mut p = delaunay_profile(h, r0, (-3.0, 3.0))?;
            p.label = name.to_string();
            rot(p, e)?
        }
        "enneper" => euclidean_patch(
            "enneper",
            Domain::new(-1.0, 1.0, -1.0, 1.0)?,
            PatchTags { rotational: false, isothermic: true, umbilic: false },
            |u, v| {
                let x = u - u * u * u / 3.0 + u * v * v;
                let y = -(v - v * v * v / 3.0 + v * u * u);
                [x, y, u * u - v * v]
            },
        ),
        "spline-profile" => {
            let seed = param(params, "seed", 7.0)?;
            if seed < 0.0 || libm::trunc(seed) != seed {
                return Err(Error::InvalidParameter { name: "seed".into(), reason: "must be a non-negative integer".into() });
            }
            rot(spline_profile(seed as u64)?, e)?
        }
        "spherical-band" => {
            let sf = SpaceForm::Spherical;
            let p = ProfileCurve::analytic("spherical-band", sf, (0.0, 1.5), false, |s| {
                let r = s.sin() * 0.2 + 0.5;
                let w = (1.0 - r * r).sqrt();
                [r, w * s.sin(), w * s.cos()]
            });
            rot(p.isothermic_reparametrization()?, sf)?.with_label("spherical-band")
        }
        "hyperbolic-band" => {
            let sf = SpaceForm::Hyperbolic;
            let p = ProfileCurve::analytic("hyperbolic-band", sf, (0.0, 1.5), false, |s| {
                let r = s.sin() * 0.2 + 0.5;
                let w = (r * r + 1.0).sqrt();
                [r, w * s.sinh(), w * s.cosh()]
            });
            rot(p.isothermic_reparametrization()?, sf)?.with_label("hyperbolic-band")
        }
        "sheared-graph" => euclidean_patch("sheared-graph", Domain::new(0.1, 1.0, 0.1, 1.0)?, PatchTags::default(), |u, v| [u, v, u * v]),
        _ => return Err(Error::UnknownFixture(name.to_string())),
    };
    Ok(patch)
}

/// Channel data along the profile parameter: the conformal factor `E`, the
/// curvature `k_rot` of the direction along which it is constant, and the
/// curvature `k_prof` of the other family, each as `v`-series jets.
#[derive(Clone)]
pub struct ChannelData {
    pub span: (f64, f64),
    pub e: Arc<dyn Fn(f64, usize) -> Result<Jet2, Error> + Send + Sync>,
    pub k_rot: Arc<dyn Fn(f64, usize) -> Result<Jet2, Error> + Send + Sync>,
    pub k_prof: Arc<dyn Fn(f64, usize) -> Result<Jet2, Error> + Send + Sync>,
}

impl ChannelData {
    /// Closed-form data; `f` returns `(E, k_rot, k_prof)` on a jet.
    pub fn analytic(span: (f64, f64), f: impl Fn(&Jet2) -> [Jet2; 3] + Send + Sync + 'static) -> Self {
        let f = Arc::new(f);
        let pick = |i: usize| {
            let f = f.clone();
            Arc::new(move |s: f64, order: usize| Ok(f(&Jet2::var_v(s, order))[i]))
                as Arc<dyn Fn(f64, usize) -> Result<Jet2, Error> + Send + Sync>
        };
        Self { span, e: pick(0), k_rot: pick(1), k_prof: pick(2) }
    }

    /// Data read off a patch along the `v`-line `u = u0`, with `u` the
    /// direction in which the curvatures are constant.
    pub fn from_patch(p: &ImmersionPatch, u0: f64) -> Self {
        let span = (p.domain.v0, p.domain.v1);
        let read = |which: usize| {
            let p = p.clone();
            Arc::new(move |s: f64, order: usize| {
                let geo = surface::local_geometry(&p, u0, s, order + 2)?;
                let f = geo.forms;
                let j = match which {
                    0 => f.e,
                    1 => f.l / f.e,
                    _ => f.n / f.g,
                };
                Ok(Jet2::from_v_series(&j.v_series()[..=order], order))
            }) as Arc<dyn Fn(f64, usize) -> Result<Jet2, Error> + Send + Sync>
        };
        Self { span, e: read(0), k_rot: read(1), k_prof: read(2) }
    }
}

/// Profile of the rotational surface with the given channel data:
/// `r = √E` and `h' = E k_rot`, so that `I = E(du² + dv²)` and
/// `II = E k_rot du² + E k_prof dv²`. Validates the Codazzi constraint
/// `k_rot' / (k_prof − k_rot) = (log √E)'` and the normalization `r'² + h'² = r²`
/// on 33 samples.
pub fn channel_to_rotational(data: &ChannelData, tol: f64) -> Result<ProfileCurve, Error> {
    let (s0, s1) = data.span;
    for i in 0..=32 {
        let s = s0 + (s1 - s0) * i as f64 / 32.0;
        let e = (data.e)(s, 1)?;
        let k_rot = (data.k_rot)(s, 1)?;
        let k_prof = (data.k_prof)(s, 0)?.value();
        if !(e.value() > 0.0) {
            return Err(Error::DegenerateMetric { u: f64::NAN, v: s, det: e.value() });
        }
        let (ev, e1, kv, k1) = (e.value(), e.coeff(0, 1), k_rot.value(), k_rot.coeff(0, 1));
        let lhs = k1 / (k_prof - kv);
        let rhs = e1 / (2.0 * ev);
        let codazzi = (lhs - rhs).abs() / (1.0 + lhs.abs() + rhs.abs());
        if !(codazzi <= tol) {
            return Err(Error::CodazziViolation { u: s, defect: codazzi });
        }
        let norm = (e1 * e1 / (4.0 * ev) + ev * ev * kv * kv - ev).abs() / ev;
        if !(norm <= tol) {
            return Err(Error::NormalizationViolated { v: s, defect: norm });
        }
    }
    let data = data.clone();
    Ok(ProfileCurve::from_series("channel", SpaceForm::Euclidean, (s0, s1), true, move |s, order| {
        let e = (data.e)(s, order)?;
        let slope = e * (data.k_rot)(s, order)?;
        let pieces = 1 + ((s - s0).abs() / 0.25) as usize;
        let h0 = integrate_1d(s0, s, pieces, 16, |t| {
            let e = (data.e)(t, 0)?.value();
            Ok::<f64, Error>(e * (data.k_rot)(t, 0)?.value())
        })?;
        let mut h = Jet2::constant(h0, order);
        for k in 0..order {
            h.set_coeff(0, k + 1, slope.coeff(0, k) / (k + 1) as f64);
        }
        Ok([e.try_sqrt()?, h, Jet2::constant(1.0, order)])
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{curvature_data, fundamental_forms, UMBILIC_TOL};

    fn fixture(name: &str) -> ImmersionPatch {
        builtin_fixture(name, &Params::new()).unwrap()
    }

    #[test]
    fn catenoid_closed_forms() {
        let p = fixture("catenoid");
        let ff = fundamental_forms(&p, 1.0, 0.4).unwrap();
        let c2 = libm::cosh(0.4) * libm::cosh(0.4);
        assert!((ff.e - c2).abs() < 1e-14 && (ff.g - c2).abs() < 1e-14);
    }

    #[test]
    fn cylinder_curvatures() {
        let mut params = Params::new();
        params.insert("a".into(), 2.0);
        let p = builtin_fixture("cylinder", &params).unwrap();
        let c = curvature_data(&p, 0.3, 0.2, UMBILIC_TOL).unwrap();
        assert!((c.k1 - 0.5).abs() < 1e-15 && c.k2.abs() < 1e-15);
    }

    #[test]
    fn unknown_fixture() {
        assert!(matches!(builtin_fixture("klein-bottle", &Params::new()), Err(Error::UnknownFixture(_))));
    }

    #[test]
    fn delaunay_cylinder_is_a_fixed_point() {
        let p = delaunay_profile(0.5, 1.0, (-2.0, 2.0)).unwrap();
        for v in [-2.0, -0.7, 0.0, 1.3, 2.0] {
            let [r, h, _] = p.value(v).unwrap();
            assert!((r - 1.0).abs() < 1e-12 && (h - v).abs() < 1e-12);
        }
    }

    #[test]
    fn delaunay_minimal_neck_is_a_catenoid() {
        let p = delaunay_profile(0.0, 1.0, (-1.5, 1.5)).unwrap();
        for v in [-1.5, -0.4, 0.9, 1.5] {
            let [r, h, _] = p.value(v).unwrap();
            assert!((r - libm::cosh(v)).abs() < 1e-8 && (h - v).abs() < 1e-8, "v={v}");
        }
        // a horizontal start tangent gives the plane instead
        let flat = delaunay_profile_with(0.0, 1.0, 0.0, (-1.0, 1.0)).unwrap();
        let [r, h, _] = flat.value(1.0).unwrap();
        assert!((r - libm::exp(1.0)).abs() < 1e-9 && h.abs() < 1e-12);
    }

    #[test]
    fn unduloid_extent() {
        let p = delaunay_profile(0.5, 0.6, (-3.0, 3.0)).unwrap();
        let rmax = (0..=300).map(|i| p.value(-3.0 + 0.02 * i as f64).unwrap()[0]).fold(0.0, f64::max);
        assert!(rmax <= 1.4 + 1e-10 && rmax > 1.3);
    }

    #[test]
    fn neck_collapse_is_reported() {
        // round sphere r = sech v approaches the axis
        assert!(matches!(delaunay_profile(1.0, 1.0, (-20.0, 20.0)), Err(Error::NeckCollapse { .. })));
        assert!(matches!(delaunay_profile(0.5, -1.0, (-1.0, 1.0)), Err(Error::NonPositiveRadius { .. })));
    }

    #[test]
    fn rotational_formulas_match_pipeline() {
        for name in ["cylinder", "cone", "catenoid", "unduloid", "nodoid", "spline-profile", "spherical-band", "hyperbolic-band"] {
            let p = fixture(name);
            let prof = profile_of(name);
            for i in 0..7 {
                let v = p.domain.v0 + p.domain.height() * (0.05 + 0.15 * i as f64);
                let c = curvature_data(&p, 0.4, v, UMBILIC_TOL).unwrap();
                let (k1, k2) = rotational_curvatures(&prof, v, p.sf).unwrap();
                assert!((c.k1 - k1).abs() < 1e-10, "{name} k1 {} vs {}", c.k1, k1);
                assert!((c.k2 - k2).abs() < 1e-10, "{name} k2 {} vs {}", c.k2, k2);
            }
        }
    }

    fn profile_of(name: &str) -> ProfileCurve {
        let e = SpaceForm::Euclidean;
        match name {
            "cylinder" => {
                ProfileCurve::analytic("c", e, (-1.0, 1.0), true, |v| [Jet2::constant(1.0, v.order()), *v, Jet2::constant(1.0, v.order())])
            }
            "cone" => {
                let (sa, ca) = (0.5, libm::sqrt(0.75));
                ProfileCurve::analytic("c", e, (-1.0, 1.0), true, move |v| {
                    let g = (*v * sa).exp();
                    [g * sa, g * ca, Jet2::constant(1.0, v.order())]
                })
            }
            "catenoid" => ProfileCurve::analytic("c", e, (-1.0, 1.0), true, |v| [v.cosh(), *v, Jet2::constant(1.0, v.order())]),
            "unduloid" => delaunay_profile(0.5, 0.6, (-3.0, 3.0)).unwrap(),
            "nodoid" => delaunay_profile(0.5, 2.5, (-3.0, 3.0)).unwrap(),
            "spline-profile" => spline_profile(7).unwrap(),
            "spherical-band" => ProfileCurve::analytic("b", SpaceForm::Spherical, (0.0, 1.5), false, |s| {
                let r = s.sin() * 0.2 + 0.5;
                let w = (1.0 - r * r).sqrt();
                [r, w * s.sin(), w * s.cos()]
            })
            .isothermic_reparametrization()
            .unwrap(),
            "hyperbolic-band" => ProfileCurve::analytic("b", SpaceForm::Hyperbolic, (0.0, 1.5), false, |s| {
                let r = s.sin() * 0.2 + 0.5;
                let w = (r * r + 1.0).sqrt();
                [r, w * s.sinh(), w * s.cosh()]
            })
            .isothermic_reparametrization()
            .unwrap(),
            _ => unreachable!(),
        }
    }

    #[test]
    fn torus_profile_is_not_normalized() {
        let prof = ProfileCurve::analytic("t", SpaceForm::Euclidean, (-PI, PI), false, |v| {
            [v.cos() * 0.5 + 2.0, v.sin() * 0.5, Jet2::constant(1.0, v.order())]
        });
        assert!(matches!(rotational_curvatures(&prof, 0.2, SpaceForm::Euclidean), Err(Error::NormalizationViolated { .. })));
    }

    #[test]
    fn band_patches_stay_on_their_quadrics() {
        for name in ["spherical-band", "hyperbolic-band"] {
            let p = fixture(name);
            let g = crate::grid::Grid::new(9, 9, p.domain);
            p.validate(&g).unwrap();
        }
    }

    #[test]
    fn isothermic_reparametrization_normalizes() {
        let p = spline_profile(3).unwrap();
        let (a, b) = p.span;
        for i in 0..=10 {
            let v = a + (b - a) * i as f64 / 10.0;
            assert!(p.normalization_defect(v).unwrap() < 1e-12);
        }
    }

    #[test]
    fn channel_examples() {
        let cyl = ChannelData::analytic((-1.0, 1.0), |s| {
            let o = s.order();
            [Jet2::constant(4.0, o), Jet2::constant(0.5, o), Jet2::zero(o)]
        });
        let p = channel_to_rotational(&cyl, 1e-10).unwrap();
        let [r, h, _] = p.value(0.5).unwrap();
        assert!((r - 2.0).abs() < 1e-14 && (h - 3.0).abs() < 1e-12);

        let cat = ChannelData::analytic((-1.0, 1.0), |s| {
            let c2 = s.cosh() * s.cosh();
            [c2, c2.recip(), -c2.recip()]
        });
        let p = channel_to_rotational(&cat, 1e-10).unwrap();
        let g = p.series_at(0.3, 2).unwrap();
        assert!((g[1].coeff(0, 1) - 1.0).abs() < 1e-14);
        assert!((g[0].value() - libm::cosh(0.3)).abs() < 1e-14);

        let bad = ChannelData::analytic((-1.0, 1.0), |s| {
            let c2 = s.cosh() * s.cosh();
            [c2, c2.recip(), c2.recip() * -2.0]
        });
        assert!(matches!(channel_to_rotational(&bad, 1e-8), Err(Error::CodazziViolation { .. })));
    }

    #[test]
    fn defaults_match_the_catalogue() {
        for name in FIXTURES {
            let params: Params = fixture_defaults(name).unwrap().iter().map(|(k, v)| (k.to_string(), *v)).collect();
            let a = builtin_fixture(name, &params).unwrap();
            let b = builtin_fixture(name, &Params::new()).unwrap();
            let (u, v) = a.domain.from_unit(0.3, 0.6);
            assert_eq!(a.point(u, v).unwrap(), b.point(u, v).unwrap(), "{name}");
        }
        let mut bad = Params::new();
        bad.insert("radius".into(), 1.0);
        assert!(matches!(builtin_fixture("cylinder", &bad), Err(Error::InvalidParameter { .. })));
        assert!(matches!(fixture_defaults("klein-bottle"), Err(Error::UnknownFixture(_))));
    }

    #[test]
    fn tabulated_catenoid_profile() {
        let s: Vec<f64> = (0..=40).map(|i| -1.0 + i as f64 * 0.05).collect();
        let r: Vec<f64> = s.iter().map(|&x| libm::cosh(x)).collect();
        let prof = tabulated_profile("table", &s, &r, &s).unwrap();
        let p = make_rotational(&prof, SpaceForm::Euclidean).unwrap();
        // spline error of the tabulated cosh is O(h⁴) in position, O(h²) in curvature
        let (u, v) = p.domain.from_unit(0.3, 0.5);
        let c = curvature_data(&p, u, v, UMBILIC_TOL).unwrap();
        assert!((c.k1 + c.k2).abs() < 1e-3, "{c:?}");
        assert!(prof.normalization_defect(v).unwrap() < 1e-8);
        assert!(matches!(tabulated_profile("bad", &s[..2], &r[..2], &s[..2]), Err(Error::InvalidParameter { .. })));
    }
}
