//! CSV tables and OBJ meshes.

use std::io::Write;
use std::path::Path;

use lieminimal_core::lie_energy::{el_residuals, lie_integrand};
use lieminimal_core::spaceform::values;
use lieminimal_core::surface::local_geometry;
use lieminimal_core::{CurvatureData, Grid, ImmersionPatch, SpaceForm};

use crate::report::VariationRow;
use crate::CliError;

/// Ten significant digits.
fn num(x: f64) -> String {
    format!("{x:.9e}")
}

fn write_csv<W: Write>(out: W, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.into_iter().map(num))?;
    }
    w.flush()?;
    Ok(())
}

/// Per-point curvature data, residuals and coordinate integrand.
pub fn curvature_csv<W: Write>(out: W, samples: &[CurvatureData]) -> Result<(), csv::Error> {
    let header = ["u", "v", "k1", "k2", "H", "K", "k1_u", "k1_v", "k2_u", "k2_v", "R1", "R2", "R_normalized", "integrand"];
    write_csv(
        out,
        &header,
        samples.iter().map(|c| {
            let r = el_residuals(c);
            vec![c.u, c.v, c.k1, c.k2, c.h, c.k, c.k1_u, c.k1_v, c.k2_u, c.k2_v, r.r1, r.r2, r.max_normalized(), lie_integrand(c)]
        }),
    )
}

pub fn variation_csv<W: Write>(out: W, rows: &[VariationRow]) -> Result<(), csv::Error> {
    let header = ["bump", "center_u", "center_v", "radius_u", "radius_v", "amplitude", "dL_deps", "scaled"];
    write_csv(
        out,
        &header,
        rows.iter().map(|r| vec![r.id as f64, r.center[0], r.center[1], r.radii[0], r.radii[1], r.amplitude, r.dl_deps, r.scaled.value]),
    )
}

/// Projects a model point and a tangent vector at it to ℝ³. The flat model
/// drops the fourth coordinate; `S³` is projected stereographically from
/// `(0, 0, 0, -1)` and the hyperboloid to the Poincaré ball, both by
/// `x ↦ x₁₂₃ / (1 + x₄)`.
fn project(sf: SpaceForm, x: [f64; 4], n: [f64; 4]) -> ([f64; 3], [f64; 3]) {
    match sf {
        SpaceForm::Euclidean => ([x[0], x[1], x[2]], [n[0], n[1], n[2]]),
        _ => {
            let w = 1.0 + x[3];
            let p = [x[0] / w, x[1] / w, x[2] / w];
            let d = [n[0] / w - x[0] * n[3] / (w * w), n[1] / w - x[1] * n[3] / (w * w), n[2] / w - x[2] * n[3] / (w * w)];
            (p, d)
        }
    }
}

fn header(sf: SpaceForm) -> &'static str {
    match sf {
        SpaceForm::Euclidean => "# coordinates: R^3",
        SpaceForm::Spherical => "# coordinates: stereographic projection of S^3 from (0,0,0,-1), x -> x[0..3]/(1+x[3])",
        SpaceForm::Hyperbolic => "# coordinates: Poincare ball model of H^3, x -> x[0..3]/(1+x[3])",
    }
}

/// Writes the patch sampled on `grid` as an OBJ mesh: `nx·ny` vertices with
/// unit normals, each grid cell split into two triangles.
pub fn export_mesh<W: Write>(p: &ImmersionPatch, grid: &Grid, mut out: W) -> Result<(), CliError> {
    let mut text = String::new();
    text.push_str(&format!("# {}\n{}\n", p.label, header(p.sf)));
    let mut normals = Vec::with_capacity(grid.len());
    for (_, _, u, v) in grid.points() {
        let geo = local_geometry(p, u, v, 2)?;
        let (x, n) = project(p.sf, values(&geo.position), values(&geo.normal));
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        text.push_str(&format!("v {} {} {}\n", x[0], x[1], x[2]));
        normals.push([n[0] / len, n[1] / len, n[2] / len]);
    }
    for n in &normals {
        text.push_str(&format!("vn {} {} {}\n", n[0], n[1], n[2]));
    }
    let id = |i: usize, j: usize| j * grid.nx + i + 1;
    for j in 0..grid.ny.saturating_sub(1) {
        for i in 0..grid.nx.saturating_sub(1) {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            // for κ = 0 this winding makes face normals agree with the vertex normals
            text.push_str(&format!("f {a}//{a} {c}//{c} {b}//{b}\nf {a}//{a} {d}//{d} {c}//{c}\n"));
        }
    }
    out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| CliError::io(Path::new("<mesh>"), e))
}

pub fn write_mesh(p: &ImmersionPatch, grid: &Grid, path: &Path) -> Result<(), CliError> {
    let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    export_mesh(p, grid, std::io::BufWriter::new(file)).map_err(|e| match e {
        CliError::Io { source, .. } => CliError::io(path, source),
        other => other,
    })
}
