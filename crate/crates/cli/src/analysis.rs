//! Runs the analyses requested by a configuration.

use std::path::Path;

use lieminimal_core::grid::{Domain, Grid};
use lieminimal_core::lie_energy::{el_residuals, is_channel, lie_energy, ChannelKind};
use lieminimal_core::rotational::{builtin_fixture, make_rotational, tabulated_profile};
use lieminimal_core::surface::{check_coordinates, codazzi_residual, curvature_data, gauss_residual_with};
use lieminimal_core::variation::{bump, first_variation, random_bumps, BumpFunction};
use lieminimal_core::weingarten::{
    bonnet_check, fit_affine_weingarten_with, fit_linear_weingarten_with, is_tubular, k1k2_samples, kh_samples, stddev,
};
use lieminimal_core::{CurvatureData, ImmersionPatch, SpaceForm};
use rayon::prelude::*;

use crate::config::{Analyses, AnalysisConfig};
use crate::report::*;
use crate::CliError;

/// Builds the configured patch. Relative profile paths resolve against `base`.
pub fn build_patch(config: &AnalysisConfig, base: &Path) -> Result<ImmersionPatch, CliError> {
    let mut p = match (&config.surface.fixture, &config.surface.profile) {
        (Some(name), _) => builtin_fixture(name, &config.surface.params)?,
        (None, Some(file)) => {
            let path = base.join(file);
            let (s, r, h) = read_profile(&path)?;
            let label = path.file_stem().map_or("profile".into(), |x| x.to_string_lossy().into_owned());
            make_rotational(&tabulated_profile(&label, &s, &r, &h)?, SpaceForm::Euclidean)?
        }
        (None, None) => return Err(CliError::Config("no surface given".into())),
    };
    if let Some(d) = &config.domain {
        p = p.with_domain(Domain::new(d.u[0], d.u[1], d.v[0], d.v[1])?);
    }
    Ok(p)
}

type Columns = (Vec<f64>, Vec<f64>, Vec<f64>);

fn read_profile(path: &Path) -> Result<Columns, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CliError::Config(format!("{}: missing column `{name}`", path.display())))
    };
    let (is, ir, ih) = (column("s")?, column("r")?, column("h")?);
    let mut out: Columns = (Vec::new(), Vec::new(), Vec::new());
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let field = |i: usize| -> Result<f64, CliError> {
            record
                .get(i)
                .and_then(|x| x.trim().parse().ok())
                .ok_or_else(|| CliError::Config(format!("{}: bad number on data row {}", path.display(), line + 1)))
        };
        out.0.push(field(is)?);
        out.1.push(field(ir)?);
        out.2.push(field(ih)?);
    }
    Ok(out)
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::io(path, io),
            _ => unreachable!(),
        }
    } else {
        CliError::Config(format!("{}: {e}", path.display()))
    }
}

/// Curvature data on every grid point, evaluated in parallel; the result is
/// in grid order.
pub fn curvature_samples(p: &ImmersionPatch, grid: &Grid, tol_umb: f64) -> Result<Vec<CurvatureData>, CliError> {
    let points: Vec<(f64, f64)> = grid.points().map(|(_, _, u, v)| (u, v)).collect();
    let out: Result<Vec<_>, _> = points.par_iter().map(|&(u, v)| curvature_data(p, u, v, tol_umb)).collect();
    Ok(out?)
}

/// The seeded random bumps followed by the explicit ones.
pub fn variation_bumps(p: &ImmersionPatch, config: &AnalysisConfig) -> Result<Vec<BumpFunction>, CliError> {
    let Some(spec) = &config.analyses.variation else {
        return Ok(Vec::new());
    };
    let mut bumps = random_bumps(&p.domain, spec.count, config.seed);
    for b in &spec.bumps {
        bumps.push(bump((b.center[0], b.center[1]), (b.radii[0], b.radii[1]), b.amplitude, &p.domain)?);
    }
    Ok(bumps)
}

fn range(xs: impl Iterator<Item = f64>, tolerance: f64) -> Range {
    let (min, max) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    Range { min, max, tolerance }
}

pub fn run(config: &AnalysisConfig, base: &Path) -> Result<SurfaceReport, CliError> {
    config.validate()?;
    let p = build_patch(config, base)?;
    analyze_patch(&p, config)
}

pub fn analyze_patch(p: &ImmersionPatch, config: &AnalysisConfig) -> Result<SurfaceReport, CliError> {
    let tol = config.tolerances;
    let a: &Analyses = &config.analyses;
    let grid = Grid::new(config.grid.nx, config.grid.ny, p.domain);
    let d = p.domain;
    let (source, params) = match &config.surface.fixture {
        Some(_) => ("fixture", config.surface.params.clone()),
        None => ("profile", Default::default()),
    };
    let mut report = SurfaceReport {
        schema_version: SCHEMA_VERSION,
        generator: concat!("lieminimal ", env!("CARGO_PKG_VERSION")).to_string(),
        surface: SurfaceMeta {
            name: p.label.clone(),
            source: source.into(),
            params,
            kappa: p.sf.kappa_int(),
            domain: [d.u0, d.u1, d.v0, d.v1],
            rotational: p.tags.rotational,
            isothermic: p.tags.isothermic,
            umbilic: p.tags.umbilic,
        },
        seed: config.seed,
        grid: [grid.nx, grid.ny],
        tolerances: tol,
        coordinates: None,
        curvature: None,
        euler_lagrange: None,
        energy: None,
        channel: None,
        structure: None,
        weingarten: None,
        bonnet: Vec::new(),
        variation: None,
        verdicts: Vec::new(),
    };
    if a.is_empty() {
        return Ok(report);
    }

    let coords = check_coordinates(p, &grid, tol.curvature_line)?;
    report.coordinates = Some(CoordinateSummary {
        curvature_line: coords.curvature_line,
        isothermic: coords.isothermic,
        max_f: Measure::new(coords.max_f, tol.curvature_line),
        max_m: Measure::new(coords.max_m, tol.curvature_line),
        max_conformal_defect: Measure::new(coords.max_conf_defect, tol.curvature_line),
    });

    let needs_samples = a.curvature || a.el || a.weingarten;
    let samples = if needs_samples { curvature_samples(p, &grid, tol.umbilic)? } else { Vec::new() };
    let hs: Vec<f64> = samples.iter().map(|c| c.h).collect();
    if a.curvature {
        report.curvature = Some(CurvatureSummary {
            k1: range(samples.iter().map(|c| c.k1), tol.umbilic),
            k2: range(samples.iter().map(|c| c.k2), tol.umbilic),
            h: range(hs.iter().copied(), tol.umbilic),
            k: range(samples.iter().map(|c| c.k), tol.umbilic),
            h_stddev: Measure::new(stddev(&hs), tol.fit),
        });
    }
    if a.el {
        let res: Vec<_> = samples.iter().map(el_residuals).collect();
        let n = res.len().max(1) as f64;
        let fold = |f: &dyn Fn(&lieminimal_core::lie_energy::ELResiduals) -> f64| res.iter().map(f).fold(0.0, f64::max);
        report.euler_lagrange = Some(ElReport {
            max_normalized: Measure::new(fold(&|r| r.max_normalized()), tol.residual),
            mean_normalized: Measure::new(res.iter().map(|r| r.max_normalized()).sum::<f64>() / n, tol.residual),
            max_abs_r1: Measure::new(fold(&|r| r.r1.abs()), tol.residual),
            max_abs_r2: Measure::new(fold(&|r| r.r2.abs()), tol.residual),
            points: res.len(),
        });
    }
    if a.energy {
        report.energy = Some(EnergyReport { value: Measure::new(lie_energy(p, &grid)?, tol.residual), nodes: [grid.nx, grid.ny] });
    }
    if a.channel {
        let c = is_channel(p, &grid, tol.structure)?;
        let kind = match c.which {
            ChannelKind::K1AlongU => "k1-constant-along-u",
            ChannelKind::K2AlongV => "k2-constant-along-v",
            ChannelKind::None => "none",
        };
        report.channel = Some(ChannelReport {
            channel: c.channel,
            kind: kind.into(),
            max_k1_u: Measure::new(c.max_k1_u, tol.structure * c.scale),
            max_k2_v: Measure::new(c.max_k2_v, tol.structure * c.scale),
        });
    }
    if a.structure {
        let points: Vec<(f64, f64)> = grid.points().map(|(_, _, u, v)| (u, v)).collect();
        let codazzi: Result<Vec<f64>, _> = points.par_iter().map(|&(u, v)| codazzi_residual(p, u, v).map(|r| r.max_scaled())).collect();
        let gauss = if coords.isothermic {
            let g: Result<Vec<f64>, _> =
                points.par_iter().map(|&(u, v)| gauss_residual_with(p, u, v, tol.curvature_line).map(|r| r.scaled.abs())).collect();
            Some(Measure::new(g?.into_iter().fold(0.0, f64::max), tol.structure))
        } else {
            None
        };
        report.structure =
            Some(StructureReport { codazzi_max: Measure::new(codazzi?.into_iter().fold(0.0, f64::max), tol.structure), gauss_max: gauss });
    }
    if a.weingarten {
        let lw = fit_linear_weingarten_with(&kh_samples(&samples), tol.fit)?;
        let aw = fit_affine_weingarten_with(&k1k2_samples(&samples), tol.fit)?;
        let tubular = is_tubular(&lw, &k1k2_samples(&samples), tol.fit);
        report.weingarten = Some(WeingartenReport {
            linear: LinearFitReport {
                coeffs: lw.coeffs(),
                delta: Measure::new(lw.delta, tol.fit),
                fit_residual: Measure::new(lw.fit_residual, tol.fit),
                null_dim: lw.null_dim,
                holds: lw.holds(tol.fit),
                tubular,
                elliptic: lw.is_elliptic(tol.fit),
            },
            affine: AffineFitReport {
                coeffs: aw.coeffs(),
                fit_residual: Measure::new(aw.fit_residual, tol.fit),
                null_dim: aw.null_dim,
                holds: aw.fit_residual <= tol.fit,
            },
        });
    }
    if !a.parallel.is_empty() {
        let rows: Result<Vec<_>, _> = a
            .parallel
            .par_iter()
            .map(|&t| {
                bonnet_check(p, t, &grid).map(|b| BonnetRow {
                    t,
                    predicted: b.predicted,
                    fitted: b.fitted,
                    angle: Measure::new(b.angle, tol.fit),
                    delta: b.delta,
                    delta_t: b.delta_t,
                    delta_error: Measure::new(b.delta_t - b.delta, tol.structure),
                    fit_residual: Measure::new(b.fit_residual, tol.fit),
                })
            })
            .collect();
        report.bonnet = rows?;
    }
    if let Some(spec) = &a.variation {
        let bumps = variation_bumps(p, config)?;
        let nodes = Grid::new(spec.nodes, spec.nodes, Domain { u0: 0.0, u1: 1.0, v0: 0.0, v1: 1.0 });
        let rows: Result<Vec<_>, _> = bumps
            .par_iter()
            .enumerate()
            .map(|(id, b)| {
                first_variation(p, b, &nodes, spec.epsilon).map(|dl| VariationRow {
                    id,
                    center: [b.center.0, b.center.1],
                    radii: [b.radii.0, b.radii.1],
                    amplitude: b.amplitude,
                    dl_deps: dl,
                    scaled: Measure::new(dl / b.scale(), tol.variation),
                })
            })
            .collect();
        let rows = rows?;
        let max = rows.iter().map(|r| r.scaled.value.abs()).fold(0.0, f64::max);
        report.variation =
            Some(VariationReport { epsilon: spec.epsilon, nodes: spec.nodes, rows, max_scaled: Measure::new(max, tol.variation) });
    }
    report.verdicts = verdicts(&report, p);
    Ok(report)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn verdicts(r: &SurfaceReport, p: &ImmersionPatch) -> Vec<Verdict> {
    let tol = r.tolerances;
    let mut out = Vec::new();
    let lie_minimal = r.euler_lagrange.map(|el| el.max_normalized.within());
    let cmc = r.curvature.map(|c| c.h_stddev.within());
    let rotational = p.tags.rotational;
    if let Some(lm) = lie_minimal {
        out.push(Verdict {
            tag: "definition:lie-minimal".into(),
            statement: format!("Lie minimal: {} at tolerance {:e}", yes_no(lm), tol.residual),
            holds: lm,
            tolerance: tol.residual,
        });
        if rotational {
            out.push(Verdict {
                tag: "corollary:rotational-lie-minimal".into(),
                statement: format!("rotational surface is Lie minimal: {}", yes_no(lm)),
                holds: lm,
                tolerance: tol.residual,
            });
        }
    }
    if let (Some(lm), Some(cmc)) = (lie_minimal, cmc) {
        out.push(Verdict {
            tag: "theorem:cmc-lie-minimal".into(),
            statement: format!(
                "cmc: {}, Lie minimal: {}, rotational: {}; cmc and Lie minimal implies rotational",
                yes_no(cmc),
                yes_no(lm),
                yes_no(rotational)
            ),
            holds: !(cmc && lm) || rotational,
            tolerance: tol.fit,
        });
    }
    if let (Some(lm), Some(w)) = (lie_minimal, r.weingarten) {
        let lw = &w.linear;
        if p.sf == SpaceForm::Euclidean && lw.holds && !lw.tubular && lw.elliptic {
            out.push(Verdict {
                tag: "theorem:lw-lie-minimal".into(),
                statement: format!(
                    "non-tubular elliptic linear Weingarten, Lie minimal: {}, rotational: {}; Lie minimal implies rotational",
                    yes_no(lm),
                    yes_no(rotational)
                ),
                holds: !lm || rotational,
                tolerance: tol.fit,
            });
        }
        if p.sf == SpaceForm::Euclidean && w.affine.holds && !lw.tubular {
            out.push(Verdict {
                tag: "theorem:affine-lie-minimal".into(),
                statement: format!(
                    "non-tubular affine Weingarten, Lie minimal: {}, rotational: {}; Lie minimal exactly when rotational",
                    yes_no(lm),
                    yes_no(rotational)
                ),
                holds: lm == rotational,
                tolerance: tol.fit,
            });
        }
    }
    if !r.bonnet.is_empty() {
        let holds = r.bonnet.iter().all(BonnetRow::holds);
        out.push(Verdict {
            tag: "prop:bonnet".into(),
            statement: format!("offsets keep the linear Weingarten relation and Δ: {}", yes_no(holds)),
            holds,
            tolerance: tol.fit,
        });
    }
    if let Some(v) = &r.variation {
        let holds = v.max_scaled.within();
        out.push(Verdict {
            tag: "definition:first-variation".into(),
            statement: format!("all tested first variations vanish: {} at tolerance {:e}", yes_no(holds), tol.variation),
            holds,
            tolerance: tol.variation,
        });
    }
    out
}
