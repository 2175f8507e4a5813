//! Sampled generating hypersurfaces `f: Sigma^{n-1} -> R^n` with a unit normal.
//!
//! A [`GeneratingFront`] stores, per grid node, the position, unit normal and
//! their first derivatives along the grid axes. Closed-form generators supply
//! these through [`PlaneCurve`] / [`SurfaceMap`] evaluators (exact up to
//! rounding); sampled generators get them from finite differences.
//!
//! Sign conventions: curvature is measured against the stored normal, with
//! `d nu = -S df` for the shape operator `S`. For a counter-clockwise curve with
//! the leftward normal this is the usual signed curvature, so the unit circle
//! has `kappa = 1` and its parallel curve `f + t nu` collapses at `t = 1`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DVector, Vector3};
use serde::Serialize;
use thiserror::Error;

use crate::diff::{self, Boundary};
use crate::jet::Jet;

/// Nodes with `|f'| < IMMERSION_REL * max |f'|` are rejected.
pub const IMMERSION_REL: f64 = 1e-9;
/// `kappa'` counts as zero when `|kappa'| <= VERTEX_ZERO_REL * max |kappa'|`.
pub const VERTEX_ZERO_REL: f64 = 1e-8;
/// Bisection stops once `|kappa'| <= VERTEX_REFINE_REL * max |kappa'|`.
pub const VERTEX_REFINE_REL: f64 = 1e-10;
/// Curvature is constant when `max |kappa'| <= CONSTANT_CURVATURE_REL * max |kappa|`.
pub const CONSTANT_CURVATURE_REL: f64 = 1e-10;
/// A parallel node is singular when `|1 - t lambda_i| <= PARALLEL_SINGULAR_TOL`.
pub const PARALLEL_SINGULAR_TOL: f64 = 1e-9;
/// Tolerance on `|nu| = 1` for supplied normals.
pub const UNIT_NORMAL_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("not an immersion at node {node} (parameter {param})")]
    NotImmersion { node: usize, param: f64 },
    #[error("metric singular at node {node}")]
    MetricSingular { node: usize },
    #[error("grid too small: {got} nodes per axis, need at least {need}")]
    GridTooSmall { got: usize, need: usize },
    #[error("invalid parameter domain: {0}")]
    InvalidDomain(String),
    #[error("normal at node {node} is not a unit normal (deviation {deviation:e})")]
    BadNormal { node: usize, deviation: f64 },
    #[error("sample data mismatch: {0}")]
    SampleMismatch(String),
    #[error("operation requires a plane-curve generator")]
    NotACurve,
}

pub type Result<T> = std::result::Result<T, GeometryError>;

/// A closed-form plane curve, evaluated on Taylor jets so every derivative is
/// available exactly.
pub trait PlaneCurve: Send + Sync + fmt::Debug {
    fn eval(&self, t: Jet) -> [Jet; 2];
}

/// Position and derivatives up to second order of a parametrised surface.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfacePoint {
    pub p: Vector3<f64>,
    pub pu: Vector3<f64>,
    pub pv: Vector3<f64>,
    pub puu: Vector3<f64>,
    pub puv: Vector3<f64>,
    pub pvv: Vector3<f64>,
}

pub trait SurfaceMap: Send + Sync + fmt::Debug {
    fn eval(&self, u: f64, v: f64) -> SurfacePoint;
}

#[derive(Clone, Debug)]
pub enum Analytic {
    Curve(Arc<dyn PlaneCurve>),
    Surface(Arc<dyn SurfaceMap>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrontKind {
    ClosedCurve,
    OpenCurve,
    SurfacePatch,
    ClosedSurface,
}

impl FrontKind {
    pub fn is_curve(self) -> bool {
        matches!(self, FrontKind::ClosedCurve | FrontKind::OpenCurve)
    }

    /// Compact parameter domain.
    pub fn is_closed(self) -> bool {
        matches!(self, FrontKind::ClosedCurve | FrontKind::ClosedSurface)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CurveDomain {
    /// Uniform nodes on `[start, start + period)`.
    Closed { start: f64, period: f64 },
    /// Uniform nodes on `[start, end]`, both ends included.
    Open { start: f64, end: f64 },
}

impl CurveDomain {
    pub fn full_turn() -> Self {
        CurveDomain::Closed { start: 0.0, period: 2.0 * PI }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SurfaceDomain {
    Patch { u: (f64, f64), v: (f64, f64) },
    /// Colatitude `theta in (0, pi)` on cell-centred rows (no pole rows),
    /// longitude `phi` periodic on `[0, 2 pi)`.
    LatLong,
}

/// One uniformly spaced grid axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Axis {
    pub start: f64,
    pub step: f64,
    pub len: usize,
    pub periodic: bool,
}

impl Axis {
    pub fn value(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn boundary(&self) -> Boundary {
        if self.periodic {
            Boundary::Periodic
        } else {
            Boundary::Open
        }
    }

    pub fn period(&self) -> f64 {
        self.step * self.len as f64
    }
}

/// Per-node sample of the generator.
#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub param: Vec<f64>,
    pub position: DVector<f64>,
    pub normal: DVector<f64>,
    /// `df(d/du_i)` for each grid axis.
    pub tangents: Vec<DVector<f64>>,
    /// `d nu(d/du_i)` for each grid axis.
    pub normal_derivs: Vec<DVector<f64>>,
}

#[derive(Clone, Debug)]
pub struct GeneratingFront {
    kind: FrontKind,
    dim: usize,
    axes: Vec<Axis>,
    orientation: f64,
    nodes: Vec<Node>,
    analytic: Option<Analytic>,
}

/// Jets of a closed-form curve at one parameter value.
#[derive(Clone, Copy, Debug)]
pub struct CurveJets {
    pub position: [Jet; 2],
    pub velocity: [Jet; 2],
    pub normal: [Jet; 2],
    pub kappa: Jet,
}

pub(crate) fn curve_jets(curve: &dyn PlaneCurve, orientation: f64, t: f64) -> CurveJets {
    let position = curve.eval(Jet::variable(t));
    let velocity = [position[0].derivative(), position[1].derivative()];
    let accel = [velocity[0].derivative(), velocity[1].derivative()];
    let speed2 = velocity[0] * velocity[0] + velocity[1] * velocity[1];
    let speed = speed2.sqrt();
    let inv = speed.recip() * orientation;
    let normal = [-velocity[1] * inv, velocity[0] * inv];
    let cross = velocity[0] * accel[1] - velocity[1] * accel[0];
    let kappa = cross * (speed2 * speed).recip() * orientation;
    CurveJets { position, velocity, normal, kappa }
}

fn dv2(x: f64, y: f64) -> DVector<f64> {
    DVector::from_vec(vec![x, y])
}

fn dv3(v: &Vector3<f64>) -> DVector<f64> {
    DVector::from_vec(vec![v.x, v.y, v.z])
}

fn check_grid(len: usize) -> Result<()> {
    if len < diff::MIN_LINE {
        return Err(GeometryError::GridTooSmall { got: len, need: diff::MIN_LINE });
    }
    Ok(())
}

fn curve_axis(domain: CurveDomain, n: usize) -> Result<Axis> {
    match domain {
        CurveDomain::Closed { start, period } => {
            if !(period.is_finite() && period > 0.0 && start.is_finite()) {
                return Err(GeometryError::InvalidDomain(format!("closed period {period}")));
            }
            Ok(Axis { start, step: period / n as f64, len: n, periodic: true })
        }
        CurveDomain::Open { start, end } => {
            if !(start.is_finite() && end.is_finite() && end > start) {
                return Err(GeometryError::InvalidDomain(format!("open interval [{start}, {end}]")));
            }
            Ok(Axis { start, step: (end - start) / (n - 1) as f64, len: n, periodic: false })
        }
    }
}

fn surface_axes(domain: SurfaceDomain, nu: usize, nv: usize) -> Result<(FrontKind, [Axis; 2])> {
    match domain {
        SurfaceDomain::Patch { u, v } => {
            for (a, b) in [u, v] {
                if !(a.is_finite() && b.is_finite() && b > a) {
                    return Err(GeometryError::InvalidDomain(format!("patch interval [{a}, {b}]")));
                }
            }
            Ok((
                FrontKind::SurfacePatch,
                [
                    Axis { start: u.0, step: (u.1 - u.0) / (nu - 1) as f64, len: nu, periodic: false },
                    Axis { start: v.0, step: (v.1 - v.0) / (nv - 1) as f64, len: nv, periodic: false },
                ],
            ))
        }
        SurfaceDomain::LatLong => {
            let dt = PI / nu as f64;
            Ok((
                FrontKind::ClosedSurface,
                [
                    Axis { start: 0.5 * dt, step: dt, len: nu, periodic: false },
                    Axis { start: 0.0, step: 2.0 * PI / nv as f64, len: nv, periodic: true },
                ],
            ))
        }
    }
}

/// Sorted eigenvalues of `I^{-1} II` for 2x2 fundamental forms, via the
/// symmetric matrix `L^{-1} II L^{-T}` with `I = L L^T`; this avoids the
/// cancellation of the `H +- sqrt(H^2 - K)` formula at umbilics.
fn shape_eigenvalues(first: [f64; 3], second: [f64; 3]) -> Option<[f64; 2]> {
    let [e, f, g] = first;
    let [l, m, n] = second;
    let det = e * g - f * f;
    let scale = e.abs().max(g.abs());
    if !(e > 0.0 && det > 1e-14 * scale * scale) {
        return None;
    }
    let l11 = e.sqrt();
    let l21 = f / l11;
    let l22 = (g - l21 * l21).sqrt();
    // S = L^{-1} II L^{-T}, entries (a, b; b, c).
    let a = l / e;
    let b = (m - l21 * a * l11) / (l11 * l22);
    let c = (n - 2.0 * l21 * b * l22 - l21 * l21 * a) / (l22 * l22);
    let mean = 0.5 * (a + c);
    let half = 0.5 * (a - c);
    let r = half.hypot(b);
    Some([mean - r, mean + r])
}

impl GeneratingFront {
    /// Samples a closed-form plane curve on a uniform grid with the leftward
    /// unit normal (tangent rotated by +pi/2).
    pub fn build_curve(curve: Arc<dyn PlaneCurve>, domain: CurveDomain, grid_size: usize) -> Result<Self> {
        check_grid(grid_size)?;
        let axis = curve_axis(domain, grid_size)?;
        let kind = if axis.periodic { FrontKind::ClosedCurve } else { FrontKind::OpenCurve };
        let mut nodes = Vec::with_capacity(grid_size);
        let mut speeds = Vec::with_capacity(grid_size);
        for i in 0..grid_size {
            let t = axis.value(i);
            let j = curve_jets(curve.as_ref(), 1.0, t);
            let vel = dv2(j.velocity[0].value(), j.velocity[1].value());
            speeds.push(vel.norm());
            nodes.push(Node {
                param: vec![t],
                position: dv2(j.position[0].value(), j.position[1].value()),
                normal: dv2(j.normal[0].value(), j.normal[1].value()),
                tangents: vec![vel],
                normal_derivs: vec![dv2(j.normal[0].derivative_value(1), j.normal[1].derivative_value(1))],
            });
        }
        check_immersion(&speeds, &nodes)?;
        Ok(Self { kind, dim: 2, axes: vec![axis], orientation: 1.0, nodes, analytic: Some(Analytic::Curve(curve)) })
    }

    /// Builds a curve generator from sampled positions. Without supplied
    /// normals the leftward normal of the finite-difference tangent is used.
    pub fn curve_from_samples(
        positions: Vec<[f64; 2]>,
        normals: Option<Vec<[f64; 2]>>,
        domain: CurveDomain,
    ) -> Result<Self> {
        let n = positions.len();
        check_grid(n)?;
        let axis = curve_axis(domain, n)?;
        let kind = if axis.periodic { FrontKind::ClosedCurve } else { FrontKind::OpenCurve };
        let pos: Vec<DVector<f64>> = positions.iter().map(|p| dv2(p[0], p[1])).collect();
        let tang = diff::first(&pos, axis.step, axis.boundary());
        let speeds: Vec<f64> = tang.iter().map(|v| v.norm()).collect();
        let nrm: Vec<DVector<f64>> = match normals {
            Some(ns) => {
                if ns.len() != n {
                    return Err(GeometryError::SampleMismatch(format!("{} normals for {n} positions", ns.len())));
                }
                ns.iter().map(|p| dv2(p[0], p[1])).collect()
            }
            None => tang
                .iter()
                .map(|v| {
                    let s = v.norm();
                    dv2(-v[1] / s, v[0] / s)
                })
                .collect(),
        };
        for (i, v) in nrm.iter().enumerate() {
            let dev = (v.norm() - 1.0).abs();
            if !(dev <= UNIT_NORMAL_TOL) {
                return Err(GeometryError::BadNormal { node: i, deviation: dev });
            }
        }
        let dnrm = diff::first(&nrm, axis.step, axis.boundary());
        let nodes: Vec<Node> = (0..n)
            .map(|i| Node {
                param: vec![axis.value(i)],
                position: pos[i].clone(),
                normal: nrm[i].clone(),
                tangents: vec![tang[i].clone()],
                normal_derivs: vec![dnrm[i].clone()],
            })
            .collect();
        check_immersion(&speeds, &nodes)?;
        Ok(Self { kind, dim: 2, axes: vec![axis], orientation: 1.0, nodes, analytic: None })
    }

    /// Samples a closed-form surface. `orientation = +1` takes the normal along
    /// `f_u x f_v`, `-1` the opposite one.
    pub fn build_surface(
        map: Arc<dyn SurfaceMap>,
        domain: SurfaceDomain,
        grid: (usize, usize),
        orientation: f64,
    ) -> Result<Self> {
        check_grid(grid.0)?;
        check_grid(grid.1)?;
        let (kind, axes) = surface_axes(domain, grid.0, grid.1)?;
        let mut nodes = Vec::with_capacity(grid.0 * grid.1);
        for iu in 0..grid.0 {
            for iv in 0..grid.1 {
                let (u, v) = (axes[0].value(iu), axes[1].value(iv));
                let sp = map.eval(u, v);
                let node = nodes.len();
                let cross = sp.pu.cross(&sp.pv);
                let cn = cross.norm();
                let scale = sp.pu.norm() * sp.pv.norm();
                if !(cn > 1e-12 * scale) || scale == 0.0 {
                    return Err(GeometryError::MetricSingular { node });
                }
                let nu = cross * (orientation.signum() / cn);
                let first = [sp.pu.dot(&sp.pu), sp.pu.dot(&sp.pv), sp.pv.dot(&sp.pv)];
                let second = [sp.puu.dot(&nu), sp.puv.dot(&nu), sp.pvv.dot(&nu)];
                // Weingarten: nu_j = -sum_i (I^{-1} II)_{ij} f_i.
                let [e, f, g] = first;
                let det = e * g - f * f;
                let inv = [g / det, -f / det, e / det];
                let [l, m, n] = second;
                let a11 = inv[0] * l + inv[1] * m;
                let a12 = inv[0] * m + inv[1] * n;
                let a21 = inv[1] * l + inv[2] * m;
                let a22 = inv[1] * m + inv[2] * n;
                let nu_u = -(sp.pu * a11 + sp.pv * a21);
                let nu_v = -(sp.pu * a12 + sp.pv * a22);
                nodes.push(Node {
                    param: vec![u, v],
                    position: dv3(&sp.p),
                    normal: dv3(&nu),
                    tangents: vec![dv3(&sp.pu), dv3(&sp.pv)],
                    normal_derivs: vec![dv3(&nu_u), dv3(&nu_v)],
                });
            }
        }
        Ok(Self {
            kind,
            dim: 3,
            axes: axes.to_vec(),
            orientation: orientation.signum(),
            nodes,
            analytic: Some(Analytic::Surface(map)),
        })
    }

    /// Surface generator from row-major samples (`index = iu * nv + iv`).
    /// Missing normals are taken along the finite-difference `f_u x f_v`.
    pub fn surface_from_samples(
        positions: Vec<[f64; 3]>,
        normals: Option<Vec<[f64; 3]>>,
        domain: SurfaceDomain,
        grid: (usize, usize),
    ) -> Result<Self> {
        check_grid(grid.0)?;
        check_grid(grid.1)?;
        let count = grid.0 * grid.1;
        if positions.len() != count {
            return Err(GeometryError::SampleMismatch(format!("{} positions for a {}x{} grid", positions.len(), grid.0, grid.1)));
        }
        let (kind, axes) = surface_axes(domain, grid.0, grid.1)?;
        let pos: Vec<DVector<f64>> = positions.iter().map(|p| DVector::from_row_slice(p)).collect();
        let du = axis_derivative(&pos, &axes, 0);
        let dv = axis_derivative(&pos, &axes, 1);
        let nrm: Vec<DVector<f64>> = match normals {
            Some(ns) => {
                if ns.len() != count {
                    return Err(GeometryError::SampleMismatch(format!("{} normals for {count} positions", ns.len())));
                }
                ns.iter().map(|p| DVector::from_row_slice(p)).collect()
            }
            None => (0..count)
                .map(|i| {
                    let a = Vector3::new(du[i][0], du[i][1], du[i][2]);
                    let b = Vector3::new(dv[i][0], dv[i][1], dv[i][2]);
                    let c = a.cross(&b);
                    dv3(&(c / c.norm()))
                })
                .collect(),
        };
        for (i, v) in nrm.iter().enumerate() {
            let dev = (v.norm() - 1.0).abs();
            if !(dev <= UNIT_NORMAL_TOL) {
                return Err(GeometryError::BadNormal { node: i, deviation: dev });
            }
        }
        let dnu = axis_derivative(&nrm, &axes, 0);
        let dnv = axis_derivative(&nrm, &axes, 1);
        let nodes = (0..count)
            .map(|i| Node {
                param: vec![axes[0].value(i / grid.1), axes[1].value(i % grid.1)],
                position: pos[i].clone(),
                normal: nrm[i].clone(),
                tangents: vec![du[i].clone(), dv[i].clone()],
                normal_derivs: vec![dnu[i].clone(), dnv[i].clone()],
            })
            .collect();
        Ok(Self { kind, dim: 3, axes: axes.to_vec(), orientation: 1.0, nodes, analytic: None })
    }

    /// The same generator with `nu` replaced by `-nu`.
    pub fn flipped(&self) -> Self {
        let mut out = self.clone();
        out.orientation = -self.orientation;
        for n in &mut out.nodes {
            n.normal = -&n.normal;
            for d in &mut n.normal_derivs {
                *d = -&*d;
            }
        }
        out
    }

    pub fn kind(&self) -> FrontKind {
        self.kind
    }

    /// Dimension `n` of the ambient Euclidean space of `f`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    pub fn analytic(&self) -> Option<&Analytic> {
        self.analytic.as_ref()
    }

    /// Grid spacing along the first axis.
    pub fn spacing(&self) -> f64 {
        self.axes[0].step
    }

    /// Jets of the closed-form curve at an arbitrary parameter.
    pub fn curve_jets_at(&self, t: f64) -> Option<CurveJets> {
        match &self.analytic {
            Some(Analytic::Curve(c)) => Some(curve_jets(c.as_ref(), self.orientation, t)),
            _ => None,
        }
    }

    /// `(f, nu)` at an arbitrary parameter of a closed-form generator.
    pub fn evaluate(&self, param: &[f64]) -> Option<(DVector<f64>, DVector<f64>)> {
        match &self.analytic {
            Some(Analytic::Curve(c)) => {
                let j = curve_jets(c.as_ref(), self.orientation, param[0]);
                Some((
                    dv2(j.position[0].value(), j.position[1].value()),
                    dv2(j.normal[0].value(), j.normal[1].value()),
                ))
            }
            Some(Analytic::Surface(s)) => {
                let sp = s.eval(param[0], param[1]);
                let c = sp.pu.cross(&sp.pv);
                Some((dv3(&sp.p), dv3(&(c * (self.orientation / c.norm())))))
            }
            None => None,
        }
    }

    /// Whether two node indices are neighbours on the grid (including
    /// diagonals and periodic wrap).
    pub fn grid_adjacent(&self, a: usize, b: usize) -> bool {
        let close = |i: usize, j: usize, axis: &Axis| {
            let d = i.abs_diff(j);
            d <= 1 || (axis.periodic && d == axis.len - 1)
        };
        match self.axes.len() {
            1 => close(a, b, &self.axes[0]),
            _ => {
                let nv = self.axes[1].len;
                close(a / nv, b / nv, &self.axes[0]) && close(a % nv, b % nv, &self.axes[1])
            }
        }
    }

    /// Polyline length of a curve generator (diagnostic only).
    pub fn arc_length(&self) -> Option<f64> {
        if !self.kind.is_curve() {
            return None;
        }
        let n = self.nodes.len();
        let segs = if self.kind == FrontKind::ClosedCurve { n } else { n - 1 };
        Some((0..segs).map(|i| (&self.nodes[(i + 1) % n].position - &self.nodes[i].position).norm()).sum())
    }
}

fn check_immersion(speeds: &[f64], nodes: &[Node]) -> Result<()> {
    let max = speeds.iter().cloned().fold(0.0, f64::max);
    for (i, s) in speeds.iter().enumerate() {
        if !(*s > IMMERSION_REL * max) || max == 0.0 {
            return Err(GeometryError::NotImmersion { node: i, param: nodes[i].param[0] });
        }
    }
    Ok(())
}

fn axis_derivative(values: &[DVector<f64>], axes: &[Axis; 2], axis: usize) -> Vec<DVector<f64>> {
    let (nu, nv) = (axes[0].len, axes[1].len);
    let mut out = vec![DVector::zeros(values[0].len()); values.len()];
    if axis == 0 {
        for iv in 0..nv {
            let line: Vec<DVector<f64>> = (0..nu).map(|iu| values[iu * nv + iv].clone()).collect();
            for (iu, d) in diff::first(&line, axes[0].step, axes[0].boundary()).into_iter().enumerate() {
                out[iu * nv + iv] = d;
            }
        }
    } else {
        for iu in 0..nu {
            let line = &values[iu * nv..(iu + 1) * nv];
            for (iv, d) in diff::first(line, axes[1].step, axes[1].boundary()).into_iter().enumerate() {
                out[iu * nv + iv] = d;
            }
        }
    }
    out
}

/// Principal curvature data per node.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureData {
    /// Ascending principal curvatures `lambda_1 <= ... <= lambda_{n-1}` per node.
    pub principal: Vec<Vec<f64>>,
    /// Curves only: `d kappa / dt` along the curve parameter.
    pub dkappa: Option<Vec<f64>>,
    /// Curves only: `d^2 kappa / dt^2`.
    pub d2kappa: Option<Vec<f64>>,
    /// Whether derivatives came from a closed-form evaluator.
    pub analytic: bool,
}

impl CurvatureData {
    /// Curvature of a curve generator per node.
    pub fn kappa(&self) -> Vec<f64> {
        self.principal.iter().map(|p| p[0]).collect()
    }

    pub fn branch_count(&self) -> usize {
        self.principal.first().map_or(0, Vec::len)
    }
}

/// Principal curvatures (and for curves `kappa'`, `kappa''`).
pub fn curvature(front: &GeneratingFront) -> Result<CurvatureData> {
    if front.kind.is_curve() {
        if let Some(Analytic::Curve(c)) = &front.analytic {
            let mut principal = Vec::with_capacity(front.len());
            let mut d1 = Vec::with_capacity(front.len());
            let mut d2 = Vec::with_capacity(front.len());
            for node in &front.nodes {
                let k = curve_jets(c.as_ref(), front.orientation, node.param[0]).kappa;
                principal.push(vec![k.value()]);
                d1.push(k.derivative_value(1));
                d2.push(k.derivative_value(2));
            }
            return Ok(CurvatureData { principal, dkappa: Some(d1), d2kappa: Some(d2), analytic: true });
        }
        let mut kappa = Vec::with_capacity(front.len());
        for (i, node) in front.nodes.iter().enumerate() {
            let ft = &node.tangents[0];
            let s2 = ft.norm_squared();
            if !(s2 > 0.0) {
                return Err(GeometryError::MetricSingular { node: i });
            }
            kappa.push(-node.normal_derivs[0].dot(ft) / s2);
        }
        let axis = front.axes[0];
        let d1 = diff::first(&kappa, axis.step, axis.boundary());
        let d2 = diff::second(&kappa, axis.step, axis.boundary());
        return Ok(CurvatureData {
            principal: kappa.into_iter().map(|k| vec![k]).collect(),
            dkappa: Some(d1),
            d2kappa: Some(d2),
            analytic: false,
        });
    }
    let mut principal = Vec::with_capacity(front.len());
    for (i, node) in front.nodes.iter().enumerate() {
        let (fu, fv) = (&node.tangents[0], &node.tangents[1]);
        let (nu, nv) = (&node.normal_derivs[0], &node.normal_derivs[1]);
        let first = [fu.dot(fu), fu.dot(fv), fv.dot(fv)];
        let m = -0.5 * (nu.dot(fv) + nv.dot(fu));
        let second = [-nu.dot(fu), m, -nv.dot(fv)];
        let ev = shape_eigenvalues(first, second).ok_or(GeometryError::MetricSingular { node: i })?;
        principal.push(ev.to_vec());
    }
    Ok(CurvatureData {
        principal,
        dkappa: None,
        d2kappa: None,
        analytic: matches!(front.analytic, Some(Analytic::Surface(_))),
    })
}

/// A critical point of the curvature of a plane curve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Vertex {
    pub param: f64,
    /// Grid node the vertex coincides with, if any.
    pub node: Option<usize>,
    /// `kappa'` touches zero without changing sign (grid-coincident only).
    pub even_multiplicity: bool,
    pub kappa: f64,
    pub d2kappa: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum VertexScan {
    /// `kappa'` vanishes identically; every point is critical.
    ConstantCurvature,
    Vertices(Vec<Vertex>),
}

impl VertexScan {
    pub fn count(&self) -> Option<usize> {
        match self {
            VertexScan::ConstantCurvature => None,
            VertexScan::Vertices(v) => Some(v.len()),
        }
    }

    pub fn vertices(&self) -> &[Vertex] {
        match self {
            VertexScan::ConstantCurvature => &[],
            VertexScan::Vertices(v) => v,
        }
    }
}

/// Locates the zeros of `kappa'` by sign-change bracketing on the grid and
/// refinement inside each bracket: bisection on the closed-form `kappa'` when
/// available, linear interpolation of the sampled `kappa'` otherwise.
/// Grid nodes with `kappa'` already below the zero cutoff are reported as they
/// are; runs of such nodes collapse to one vertex.
pub fn vertices(front: &GeneratingFront, data: &CurvatureData) -> Result<VertexScan> {
    if !front.kind.is_curve() {
        return Err(GeometryError::NotACurve);
    }
    let dk = data.dkappa.as_ref().ok_or(GeometryError::NotACurve)?;
    let d2k = data.d2kappa.as_ref().ok_or(GeometryError::NotACurve)?;
    let kappa = data.kappa();
    let kmax = kappa.iter().fold(0.0_f64, |m, k| m.max(k.abs()));
    let dmax = dk.iter().fold(0.0_f64, |m, k| m.max(k.abs()));
    if dmax <= CONSTANT_CURVATURE_REL * kmax || dmax == 0.0 {
        return Ok(VertexScan::ConstantCurvature);
    }
    let axis = front.axes[0];
    let n = dk.len();
    let closed = axis.periodic;
    let zero_cut = VERTEX_ZERO_REL * dmax;
    let is_zero: Vec<bool> = dk.iter().map(|d| d.abs() <= zero_cut).collect();
    let mut out = Vec::new();

    // Grid-coincident runs of zeros.
    let mut visited = vec![false; n];
    for start in 0..n {
        if !is_zero[start] || visited[start] {
            continue;
        }
        // Walk back to the start of the run (cyclically for closed curves).
        let mut first = start;
        if closed {
            let mut steps = 0;
            while is_zero[(first + n - 1) % n] && steps < n {
                first = (first + n - 1) % n;
                steps += 1;
            }
            if steps == n {
                return Ok(VertexScan::ConstantCurvature);
            }
        }
        let mut run = vec![first];
        visited[first] = true;
        let mut cur = first;
        loop {
            let next = if closed { (cur + 1) % n } else { cur + 1 };
            if next >= n || !is_zero[next] || visited[next] {
                break;
            }
            visited[next] = true;
            run.push(next);
            cur = next;
        }
        let mid = run[run.len() / 2];
        let before = if closed { Some((first + n - 1) % n) } else { first.checked_sub(1) };
        let after = {
            let a = *run.last().unwrap() + 1;
            if closed {
                Some(a % n)
            } else if a < n {
                Some(a)
            } else {
                None
            }
        };
        let even = match (before, after) {
            (Some(b), Some(a)) => dk[b].signum() == dk[a].signum(),
            _ => false,
        };
        out.push(Vertex {
            param: axis.value(mid),
            node: Some(mid),
            even_multiplicity: even,
            kappa: kappa[mid],
            d2kappa: d2k[mid],
        });
    }

    // Sign changes strictly between nodes.
    let pairs = if closed { n } else { n - 1 };
    for i in 0..pairs {
        let j = (i + 1) % n;
        if is_zero[i] || is_zero[j] || dk[i].signum() == dk[j].signum() {
            continue;
        }
        let a = axis.value(i);
        let b = a + axis.step;
        let (param, kap, d2) = match front.curve_jets_at(a) {
            Some(_) => {
                let eval = |t: f64| front.curve_jets_at(t).expect("analytic").kappa;
                let root = bisect(|t| eval(t).derivative_value(1), a, b, dk[i], VERTEX_REFINE_REL * dmax);
                let k = eval(root);
                (root, k.value(), k.derivative_value(2))
            }
            None => {
                let w = dk[i] / (dk[i] - dk[j]);
                (a + w * axis.step, kappa[i] + w * (kappa[j] - kappa[i]), d2k[i] + w * (d2k[j] - d2k[i]))
            }
        };
        let param = if closed && param >= axis.start + axis.period() { param - axis.period() } else { param };
        out.push(Vertex { param, node: None, even_multiplicity: false, kappa: kap, d2kappa: d2 });
    }
    out.sort_by(|x, y| x.param.total_cmp(&y.param));
    Ok(VertexScan::Vertices(out))
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, fa: f64, tol: f64) -> f64 {
    let mut sa = fa.signum();
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm.abs() <= tol || m == a || m == b {
            return m;
        }
        if fm.signum() == sa {
            a = m;
            sa = fm.signum();
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// `f + t nu` sampled on the same grid, with per-node singularity flags.
#[derive(Clone, Debug)]
pub struct ParallelFront {
    pub front: GeneratingFront,
    pub distance: f64,
    /// `t = 1 / lambda_i(x)` for some branch, within [`PARALLEL_SINGULAR_TOL`].
    pub singular: Vec<bool>,
}

/// The parallel hypersurface at signed distance `t`. Normals are unchanged;
/// tangents become `f_u + t nu_u`, exact when the input derivatives are.
pub fn parallel(front: &GeneratingFront, t: f64) -> Result<ParallelFront> {
    let data = curvature(front)?;
    let singular = data
        .principal
        .iter()
        .map(|ls| ls.iter().any(|l| (1.0 - t * l).abs() <= PARALLEL_SINGULAR_TOL))
        .collect();
    let nodes = front
        .nodes
        .iter()
        .map(|n| Node {
            param: n.param.clone(),
            position: parallel_point(&n.position, &n.normal, t),
            normal: n.normal.clone(),
            tangents: n.tangents.iter().zip(&n.normal_derivs).map(|(a, b)| a + b * t).collect(),
            normal_derivs: n.normal_derivs.clone(),
        })
        .collect();
    Ok(ParallelFront {
        front: GeneratingFront {
            kind: front.kind,
            dim: front.dim,
            axes: front.axes.clone(),
            orientation: front.orientation,
            nodes,
            analytic: None,
        },
        distance: t,
        singular,
    })
}

/// `f + t nu`, computed coordinate-wise exactly as the null-front slices are.
pub(crate) fn parallel_point(f: &DVector<f64>, nu: &DVector<f64>, t: f64) -> DVector<f64> {
    DVector::from_iterator(f.len(), f.iter().zip(nu.iter()).map(|(a, b)| a + t * b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{Circle, Ellipse, Limacon, Sphere};

    fn ellipse(n: usize) -> GeneratingFront {
        GeneratingFront::build_curve(Arc::new(Ellipse { a: 2.0, b: 1.0 }), CurveDomain::full_turn(), n).unwrap()
    }

    /// Closed-form curvature of `(a cos t, b sin t)`.
    fn ellipse_kappa(a: f64, b: f64, t: f64) -> f64 {
        a * b / (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).powf(1.5)
    }

    #[test]
    fn unit_circle_normals() {
        let c = GeneratingFront::build_curve(Arc::new(Circle { radius: 1.0 }), CurveDomain::full_turn(), 256).unwrap();
        for n in c.nodes() {
            assert!((n.normal.norm() - 1.0).abs() < 1e-14);
            assert!(n.normal.dot(&n.tangents[0]).abs() < 1e-15);
            // Leftward normal of a counter-clockwise circle points inward.
            assert!((&n.normal + &n.position).norm() < 1e-15);
        }
        let k = curvature(&c).unwrap();
        assert!(k.kappa().iter().all(|k| (k - 1.0).abs() < 1e-14));
        assert_eq!(vertices(&c, &k).unwrap(), VertexScan::ConstantCurvature);
    }

    #[test]
    fn ellipse_curvature_matches_closed_form() {
        let e = ellipse(256);
        let k = curvature(&e).unwrap();
        for (node, kk) in e.nodes().iter().zip(k.kappa()) {
            assert!((kk - ellipse_kappa(2.0, 1.0, node.param[0])).abs() < 1e-13);
        }
        assert!((k.kappa()[0] - 2.0).abs() < 1e-14);
        assert!((k.kappa()[64] - 0.25).abs() < 1e-14);
    }

    #[test]
    fn finite_difference_curvature_close_to_analytic() {
        let e = ellipse(256);
        let analytic = curvature(&e).unwrap().kappa();
        let pos: Vec<[f64; 2]> = e.nodes().iter().map(|n| [n.position[0], n.position[1]]).collect();
        let sampled = GeneratingFront::curve_from_samples(pos, None, CurveDomain::full_turn()).unwrap();
        let fd = curvature(&sampled).unwrap();
        assert!(!fd.analytic);
        let err = fd.kappa().iter().zip(&analytic).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err <= 1e-3, "max error {err}");
    }

    #[test]
    fn ellipse_has_four_vertices() {
        let e = ellipse(512);
        let k = curvature(&e).unwrap();
        let scan = vertices(&e, &k).unwrap();
        let params: Vec<f64> = scan.vertices().iter().map(|v| v.param).collect();
        let expect = [0.0, PI / 2.0, PI, 1.5 * PI];
        assert_eq!(params.len(), 4);
        for (p, e) in params.iter().zip(expect) {
            assert!((p - e).abs() < 1e-9, "{p} vs {e}");
        }
    }

    #[test]
    fn off_grid_vertices_are_refined() {
        // 250 nodes: pi/2 is not a node, so the vertices come from bisection.
        let e = ellipse(250);
        let k = curvature(&e).unwrap();
        let scan = vertices(&e, &k).unwrap();
        let expect = [0.0, PI / 2.0, PI, 1.5 * PI];
        assert_eq!(scan.count(), Some(4));
        for (v, e) in scan.vertices().iter().zip(expect) {
            assert!((v.param - e).abs() < 1e-9, "{} vs {e}", v.param);
        }
    }

    #[test]
    fn limacon_has_two_vertices() {
        let l = GeneratingFront::build_curve(Arc::new(Limacon), CurveDomain::full_turn(), 512).unwrap();
        let k = curvature(&l).unwrap();
        assert!(k.kappa().iter().all(|&x| x > 0.0));
        let scan = vertices(&l, &k).unwrap();
        let params: Vec<f64> = scan.vertices().iter().map(|v| v.param).collect();
        assert_eq!(params.len(), 2);
        assert!((params[0] - PI / 2.0).abs() < 1e-9);
        assert!((params[1] - 1.5 * PI).abs() < 1e-9);
    }

    #[test]
    fn sampled_vertices_use_interpolation() {
        let e = ellipse(250);
        let pos: Vec<[f64; 2]> = e.nodes().iter().map(|n| [n.position[0], n.position[1]]).collect();
        let sampled = GeneratingFront::curve_from_samples(pos, None, CurveDomain::full_turn()).unwrap();
        let k = curvature(&sampled).unwrap();
        let scan = vertices(&sampled, &k).unwrap();
        assert_eq!(scan.count(), Some(4));
        assert!((scan.vertices()[1].param - PI / 2.0).abs() < 1e-3);
    }

    #[test]
    fn degenerate_curve_is_rejected() {
        #[derive(Debug)]
        struct Cusp;
        impl PlaneCurve for Cusp {
            fn eval(&self, t: Jet) -> [Jet; 2] {
                // (t^2, t^3) has zero speed at t = 0.
                [t * t, t * t * t]
            }
        }
        let err = GeneratingFront::build_curve(Arc::new(Cusp), CurveDomain::Open { start: -1.0, end: 1.0 }, 33)
            .unwrap_err();
        assert!(matches!(err, GeometryError::NotImmersion { node: 16, .. }));
    }

    #[test]
    fn sphere_principal_curvatures() {
        let s = GeneratingFront::build_surface(Arc::new(Sphere { radius: 2.0 }), SurfaceDomain::LatLong, (32, 48), -1.0)
            .unwrap();
        let k = curvature(&s).unwrap();
        for ls in &k.principal {
            assert!((ls[0] - 0.5).abs() < 1e-12 && (ls[1] - 0.5).abs() < 1e-12, "{ls:?}");
        }
    }

    #[test]
    fn paraboloid_principal_curvatures_off_axis() {
        let s = GeneratingFront::build_surface(
            Arc::new(crate::builtins::Paraboloid),
            SurfaceDomain::Patch { u: (-1.0, 1.0), v: (-0.5, 1.5) },
            (9, 9),
            1.0,
        )
        .unwrap();
        let k = curvature(&s).unwrap();
        for (node, ls) in s.nodes().iter().zip(&k.principal) {
            let w = 1.0 + node.param[0].powi(2) + node.param[1].powi(2);
            let gauss = 1.0 / (w * w);
            let mean = (1.0 + w) / (2.0 * w.powf(1.5));
            assert!((ls[0] * ls[1] - gauss).abs() < 1e-13);
            assert!((0.5 * (ls[0] + ls[1]) - mean).abs() < 1e-13);
            assert!(ls[0] <= ls[1]);
        }
    }

    #[test]
    fn parallel_of_circle_collapses_at_unit_distance() {
        let c = GeneratingFront::build_curve(Arc::new(Circle { radius: 1.0 }), CurveDomain::full_turn(), 64).unwrap();
        let p = parallel(&c, 1.0).unwrap();
        assert!(p.singular.iter().all(|&s| s));
        assert!(p.front.nodes().iter().all(|n| n.position.norm() < 1e-15));
    }

    #[test]
    fn parallel_of_ellipse_singular_at_major_vertices() {
        // kappa(s) = 2 only at s = 0 and s = pi.
        let e = ellipse(256);
        let p = parallel(&e, 0.5).unwrap();
        let sing: Vec<usize> = p.singular.iter().enumerate().filter(|(_, s)| **s).map(|(i, _)| i).collect();
        assert_eq!(sing, vec![0, 128]);
    }

    #[test]
    fn parallel_at_zero_is_identity() {
        let e = ellipse(64);
        let p = parallel(&e, 0.0).unwrap();
        for (a, b) in p.front.nodes().iter().zip(e.nodes()) {
            assert_eq!(a.position, b.position);
            assert_eq!(a.tangents, b.tangents);
        }
    }
}
