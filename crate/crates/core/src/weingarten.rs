//! Linear (`aK + 2bH + c = 0`) and affine (`x k1 + y k2 + z = 0`) Weingarten
//! relations fitted by total least squares, tubularity, parallel surfaces and
//! the coefficient transformation under parallel offsets (Euclidean space only).

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::Error;
use crate::grid::Grid;
use crate::jets::Jet2;
use crate::spaceform::{JetVector, SpaceForm};
use crate::surface::{self, CurvatureData, ImmersionPatch, UMBILIC_TOL};

/// Fit residual below which a relation is declared to hold.
pub const FIT_TOL: f64 = 1e-6;
/// Smallest admissible `|1 − t k|` for a parallel offset.
pub const FOCAL_TOL: f64 = 1e-6;

/// Total-least-squares fit of a homogeneous linear relation between three columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelationFit {
    /// Unit coefficient vector, first nonzero entry positive.
    pub coeffs: [f64; 3],
    /// Smallest singular value divided by `√n`.
    pub fit_residual: f64,
    /// Number of singular values `σ/√n ≤ tol`.
    pub null_dim: usize,
    /// Singular values divided by `√n`, descending.
    pub singular_values: [f64; 3],
}

fn fit_rows(rows: &[[f64; 3]], tol: f64) -> Result<RelationFit, Error> {
    let n = rows.len();
    if n < 3 {
        return Err(Error::InsufficientSamples { count: n });
    }
    let m = DMatrix::from_fn(n, 3, |i, j| rows[i][j]);
    let svd = m.svd(false, true);
    let vt = svd.v_t.ok_or(Error::Numerical("SVD did not converge"))?;
    let root = libm::sqrt(n as f64);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sv: [f64; 3] = core::array::from_fn(|k| svd.singular_values[order[k]] / root);
    let row = vt.row(order[2]);
    let mut coeffs = [row[0], row[1], row[2]];
    let norm = libm::sqrt(coeffs.iter().map(|c| c * c).sum::<f64>());
    for c in coeffs.iter_mut() {
        *c /= norm;
    }
    if let Some(first) = coeffs.iter().find(|c| c.abs() > 1e-12) {
        if *first < 0.0 {
            for c in coeffs.iter_mut() {
                *c = -*c;
            }
        }
    }
    // clear negative zeros
    for c in coeffs.iter_mut() {
        if *c == 0.0 {
            *c = 0.0;
        }
    }
    Ok(RelationFit { coeffs, fit_residual: sv[2], null_dim: sv.iter().filter(|&&s| s <= tol).count(), singular_values: sv })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearWeingartenFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// `b² − ac` of the unit triple.
    pub delta: f64,
    pub fit_residual: f64,
    pub null_dim: usize,
}

impl LinearWeingartenFit {
    pub fn coeffs(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.fit_residual <= tol
    }

    pub fn is_elliptic(&self, tol: f64) -> bool {
        self.delta > tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineWeingartenFit {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub fit_residual: f64,
    pub null_dim: usize,
}

impl AffineWeingartenFit {
    pub fn coeffs(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// Fits `aK + 2bH + c = 0` to samples `(K, H)`.
pub fn fit_linear_weingarten(samples: &[(f64, f64)]) -> Result<LinearWeingartenFit, Error> {
    fit_linear_weingarten_with(samples, FIT_TOL)
}

pub fn fit_linear_weingarten_with(samples: &[(f64, f64)], tol: f64) -> Result<LinearWeingartenFit, Error> {
    let rows: Vec<[f64; 3]> = samples.iter().map(|&(k, h)| [k, 2.0 * h, 1.0]).collect();
    let f = fit_rows(&rows, tol)?;
    let [a, b, c] = f.coeffs;
    Ok(LinearWeingartenFit { a, b, c, delta: b * b - a * c, fit_residual: f.fit_residual, null_dim: f.null_dim })
}

/// Fits `x k1 + y k2 + z = 0` to samples `(k1, k2)`.
pub fn fit_affine_weingarten(samples: &[(f64, f64)]) -> Result<AffineWeingartenFit, Error> {
    fit_affine_weingarten_with(samples, FIT_TOL)
}

pub fn fit_affine_weingarten_with(samples: &[(f64, f64)], tol: f64) -> Result<AffineWeingartenFit, Error> {
    let rows: Vec<[f64; 3]> = samples.iter().map(|&(a, b)| [a, b, 1.0]).collect();
    let f = fit_rows(&rows, tol)?;
    let [x, y, z] = f.coeffs;
    Ok(AffineWeingartenFit { x, y, z, fit_residual: f.fit_residual, null_dim: f.null_dim })
}

pub fn kh_samples(data: &[CurvatureData]) -> Vec<(f64, f64)> {
    data.iter().map(|c| (c.k, c.h)).collect()
}

pub fn k1k2_samples(data: &[CurvatureData]) -> Vec<(f64, f64)> {
    data.iter().map(|c| (c.k1, c.k2)).collect()
}

fn mean_std(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count().max(1) as f64;
    let mean = xs.clone().sum::<f64>() / n;
    let var = xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, libm::sqrt(var))
}

/// Population standard deviation.
pub fn stddev(xs: &[f64]) -> f64 {
    mean_std(xs.iter().copied()).1
}

/// Tubular if `|Δ| ≤ tol` or one principal curvature is constant to `tol`
/// relative to the mean curvature scale. Samples are `(k1, k2)`.
pub fn is_tubular(fit: &LinearWeingartenFit, curvatures: &[(f64, f64)], tol: f64) -> bool {
    let (_, s1) = mean_std(curvatures.iter().map(|c| c.0));
    let (_, s2) = mean_std(curvatures.iter().map(|c| c.1));
    let (scale, _) = mean_std(curvatures.iter().map(|c| c.0.abs() + c.1.abs() + 1.0));
    fit.delta.abs() <= tol || s1 <= tol * scale || s2 <= tol * scale
}

/// `kᵢ / (1 − t kᵢ)`.
pub fn parallel_curvatures(k1: f64, k2: f64, t: f64) -> Result<(f64, f64), Error> {
    let (f1, f2) = (1.0 - t * k1, 1.0 - t * k2);
    for factor in [f1, f2] {
        if !(factor.abs() > FOCAL_TOL) {
            return Err(Error::FocalDegeneracy { t, factor });
        }
    }
    Ok((k1 / f1, k2 / f2))
}

/// `(a + 2bt + ct², b + ct, c)`, which preserves `b² − ac`.
pub fn bonnet_coeffs(a: f64, b: f64, c: f64, t: f64) -> (f64, f64, f64) {
    (a + 2.0 * b * t + c * t * t, b + c * t, c)
}

fn focal_check(forms: &surface::FormJets, t: f64) -> Result<(), Error> {
    let (h, k) = forms.mean_gauss();
    let (h, k) = (h.value(), k.value());
    let root = libm::sqrt((h * h - k).max(0.0));
    parallel_curvatures(h + root, h - root, t).map(|_| ())
}

/// `X + t n` with the unit normal of the patch. The offset keeps the domain
/// and is checked for focal points on a 9 × 9 grid.
pub fn parallel_surface(p: &ImmersionPatch, t: f64) -> Result<ImmersionPatch, Error> {
    if p.sf != SpaceForm::Euclidean {
        return Err(Error::RequiresEuclidean);
    }
    let base = p.clone();
    let out = ImmersionPatch::new(alloc::format!("{} (parallel t={t})", p.label), p.sf, p.domain, move |u, v, order| {
        let geo = surface::local_geometry(&base, u, v, (order + 1).max(2))?;
        focal_check(&geo.forms, t)?;
        let mut x: JetVector = core::array::from_fn(|i| (geo.position[i] + geo.normal[i] * t).truncate(order));
        x[3] = Jet2::constant(1.0, order);
        Ok(x)
    })
    .with_tags(surface::PatchTags { isothermic: p.tags.isothermic && t == 0.0, ..p.tags });
    for (_, _, u, v) in Grid::new(9, 9, p.domain).points() {
        out.eval(u, v, 0)?;
    }
    Ok(out)
}

/// Bonnet check for one offset distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BonnetCheck {
    pub t: f64,
    pub base: [f64; 3],
    pub predicted: [f64; 3],
    pub fitted: [f64; 3],
    /// Distance between the unit predicted and fitted triples (sign-aligned).
    pub angle: f64,
    pub delta: f64,
    pub delta_t: f64,
    pub fit_residual: f64,
}

fn unit(v: [f64; 3]) -> [f64; 3] {
    let n = libm::sqrt(v.iter().map(|c| c * c).sum::<f64>());
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Fits the base relation, transforms it with [`bonnet_coeffs`], fits the
/// offset patch independently and compares.
pub fn bonnet_check(p: &ImmersionPatch, t: f64, grid: &Grid) -> Result<BonnetCheck, Error> {
    let base = fit_linear_weingarten(&kh_samples(&surface::curvature_grid(p, grid, UMBILIC_TOL)?))?;
    let offset = parallel_surface(p, t)?;
    let fitted = fit_linear_weingarten(&kh_samples(&surface::curvature_grid(&offset, grid, UMBILIC_TOL)?))?;
    let (a, b, c) = bonnet_coeffs(base.a, base.b, base.c, t);
    let predicted = [a, b, c];
    let pu = unit(predicted);
    let fu = fitted.coeffs();
    let dot: f64 = (0..3).map(|i| pu[i] * fu[i]).sum();
    let sign = if dot < 0.0 { -1.0 } else { 1.0 };
    let angle = libm::sqrt((0..3).map(|i| (pu[i] - sign * fu[i]) * (pu[i] - sign * fu[i])).sum::<f64>());
    // rescale the fitted triple to the predicted one before comparing Δ
    let lambda: f64 = (0..3).map(|i| fu[i] * predicted[i]).sum();
    let s: [f64; 3] = core::array::from_fn(|i| lambda * fu[i]);
    Ok(BonnetCheck {
        t,
        base: base.coeffs(),
        predicted,
        fitted: fu,
        angle,
        delta: base.delta,
        delta_t: s[1] * s[1] - s[0] * s[2],
        fit_residual: fitted.fit_residual,
    })
}

/// Offset distance at which the parallel surface has constant mean curvature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmcParallel {
    /// Minimizer of the spread of `Hᵗ` over the samples.
    pub t0: f64,
    pub stddev_h: f64,
    pub mean_h: f64,
    /// Root of `a + 2bt + ct² = 0` from the fitted relation, if one lies in the bracket.
    pub analytic_t0: Option<f64>,
}

/// Golden-section search of `t ↦ stddev(Hᵗ)` over `bracket`, with `Hᵗ` from
/// [`parallel_curvatures`] applied to the grid samples.
pub fn cmc_parallel_search(p: &ImmersionPatch, grid: &Grid, bracket: (f64, f64)) -> Result<CmcParallel, Error> {
    if p.sf != SpaceForm::Euclidean {
        return Err(Error::RequiresEuclidean);
    }
    let data = surface::curvature_grid(p, grid, UMBILIC_TOL)?;
    let spread = |t: f64| -> (f64, f64) {
        let hs = data.iter().map(|c| match parallel_curvatures(c.k1, c.k2, t) {
            Ok((a, b)) => 0.5 * (a + b),
            Err(_) => f64::INFINITY,
        });
        let (m, s) = mean_std(hs);
        (if s.is_nan() { f64::INFINITY } else { s }, m)
    };
    let g = 0.5 * (libm::sqrt(5.0) - 1.0);
    let (mut a, mut b) = bracket;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (spread(x1).0, spread(x2).0);
    for _ in 0..200 {
        if (b - a).abs() < 1e-12 {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = spread(x1).0;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = spread(x2).0;
        }
    }
    let t0 = 0.5 * (a + b);
    let (stddev_h, mean_h) = spread(t0);
    let fit = fit_linear_weingarten(&kh_samples(&data))?;
    let (lo, hi) = bracket;
    let roots: Vec<f64> = if fit.c.abs() > 1e-12 {
        let disc = fit.b * fit.b - fit.a * fit.c;
        if disc >= 0.0 {
            let r = libm::sqrt(disc);
            alloc::vec![(-fit.b + r) / fit.c, (-fit.b - r) / fit.c]
        } else {
            Vec::new()
        }
    } else if fit.b.abs() > 1e-12 {
        alloc::vec![-fit.a / (2.0 * fit.b)]
    } else {
        Vec::new()
    };
    let analytic_t0 = roots.into_iter().filter(|r| *r >= lo && *r <= hi).min_by(|x, y| (x - t0).abs().total_cmp(&(y - t0).abs()));
    Ok(CmcParallel { t0, stddev_h, mean_h, analytic_t0 })
}
