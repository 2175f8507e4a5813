//! Text artifacts: OBJ meshes, singular-locus CSV, slice polylines.
//!
//! Numbers are written with `{:.16e}` (17 significant digits, round-trips
//! every f64); lines end in LF. Each artifact is rendered in memory first.

use std::fmt::Write as _;
use std::path::Path;

use crate::frontgen::NullFront;
use crate::geometry::FrontKind;
use crate::lorentz::LorentzVector;
use crate::singular::SingularLocus;

use super::CliError;

fn num(out: &mut String, v: f64) {
    write!(out, "{v:.16e}").expect("write to string");
}

/// Viewer axes: `(x, y, t)` by default, `(t, x, y)` when `raw`.
fn vertex_coords(p: &LorentzVector, raw: bool) -> [f64; 3] {
    let c = p.coords();
    if raw {
        [c[0], c[1], c[2]]
    } else {
        [c[1], c[2], c[0]]
    }
}

/// OBJ text for a curve-generated front: one vertex per lattice node
/// `(t_j, x_i)`, row-major in `j`, and quad faces over the lattice, wrapping
/// in `x` for closed generators.
pub fn mesh_obj(front: &NullFront, raw: bool) -> Result<String, CliError> {
    let g = front.generator();
    if !g.kind().is_curve() {
        return Err(CliError::Computation("mesh export needs a curve generator (surface in 3-space)".into()));
    }
    let (m, n) = (front.t_count(), front.x_count());
    let mut out = String::with_capacity(m * n * 80);
    writeln!(out, "# null front: {} rulings x {} nodes, axes {}", m, n, if raw { "t x y" } else { "x y t" }).unwrap();
    for j in 0..m {
        for i in 0..n {
            out.push('v');
            for c in vertex_coords(&front.point(j, i), raw) {
                out.push(' ');
                num(&mut out, c);
            }
            out.push('\n');
        }
    }
    let wrap = g.kind() == FrontKind::ClosedCurve;
    let cols = if wrap { n } else { n - 1 };
    let id = |j: usize, i: usize| j * n + (i % n) + 1;
    for j in 0..m - 1 {
        for i in 0..cols {
            writeln!(out, "f {} {} {} {}", id(j, i), id(j, i + 1), id(j + 1, i + 1), id(j + 1, i)).unwrap();
        }
    }
    Ok(out)
}

/// One row per locus point. Points with no node (refined vertices) leave the
/// `node` column empty.
pub fn locus_csv(locus: &SingularLocus, front: &NullFront) -> String {
    let dim = front.generator().dim();
    let mut out = String::new();
    let params: Vec<String> = (0..dim - 1).map(|k| format!("param_{k}")).collect();
    let image: Vec<String> = (0..=dim).map(|k| format!("image_{k}")).collect();
    writeln!(out, "{},node,branch,t,lambda,vertex,class,{}", params.join(","), image.join(",")).unwrap();
    for p in &locus.points {
        for v in &p.param {
            num(&mut out, *v);
            out.push(',');
        }
        if let Some(n) = p.node {
            write!(out, "{n}").unwrap();
        }
        write!(out, ",{},", p.branch).unwrap();
        num(&mut out, p.t);
        out.push(',');
        num(&mut out, p.lambda);
        write!(out, ",{},{}", p.vertex, p.class.label()).unwrap();
        for c in p.image.coords().iter() {
            out.push(',');
            num(&mut out, *c);
        }
        out.push('\n');
    }
    out
}

/// Slice polylines `t = t_j` as CSV rows `j,i,x_0..x_n`.
pub fn slices_csv(front: &NullFront) -> String {
    let mut out = String::new();
    let coords: Vec<String> = (0..front.ambient_dim()).map(|k| format!("x_{k}")).collect();
    writeln!(out, "j,i,{}", coords.join(",")).unwrap();
    for j in 0..front.t_count() {
        for (i, p) in front.slice(j).iter().enumerate() {
            write!(out, "{j},{i}").unwrap();
            for c in p.coords().iter() {
                out.push(',');
                num(&mut out, *c);
            }
            out.push('\n');
        }
    }
    out
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))
}
