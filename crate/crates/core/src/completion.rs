//! Recovering generating data from null-front samples and gluing patches of
//! curve-generated fronts (`n = 2`) into their L-completion.
//!
//! A sample `(F(q), xi(q))` with `xi = (1, nu)` determines the ruling through
//! it: `tau = F_0`, and `g = F - tau xi` lies in the slice `tau = 0`. A patch
//! is an ordered chain of such `(g, nu)` values; patches are glued where their
//! lifts `l = (g, nu)` agree on whole neighbourhoods, not only pointwise.

use nalgebra::DVector;
use petgraph::unionfind::UnionFind;
use serde::Serialize;
use thiserror::Error;

use crate::builtins::FrontSample;
use crate::frontgen::{lift_injective, FrontError, LiftCheck, NullFront, Sigma};
use crate::geometry::{CurveDomain, FrontKind, GeneratingFront, GeometryError};
use crate::lorentz::{lorentz_dot, LorentzVector};

/// Precondition tolerance on sample normals and the deduplication radius.
pub const RECON_TOL: f64 = 1e-9;
/// Default chordal tolerance on normals for relatedness.
pub const NU_TOL: f64 = 1e-6;
/// Default positional tolerance, in units of the coarser patch's spacing.
pub const POS_TOL_FACTOR: f64 = 3.0;
/// Neighbour samples checked on each side of a related pair (`k`).
pub const NEIGHBOURS: usize = 5;
/// Lift tangents closer than this angle (radians) count as non-transversal.
pub const TRANSVERSALITY_ANGLE: f64 = 1e-3;
/// Tolerance of the `L_F = L_G o Phi` verification.
pub const LIFT_MATCH_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompletionError {
    #[error("no patches to glue")]
    NoPatches,
    #[error("patch {0} has no samples")]
    EmptyPatch(usize),
    #[error("patch data mismatch: {0}")]
    Mismatch(String),
    #[error("non-Hausdorff gluing detected at {} sample pair(s)", pairs.len())]
    NonHausdorff { pairs: Vec<(SampleId, SampleId)> },
    #[error(transparent)]
    Front(#[from] FrontError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

pub type Result<T> = std::result::Result<T, CompletionError>;

/// Data recovered from one front sample.
#[derive(Clone, Debug, PartialEq)]
pub struct Recovered {
    pub g: DVector<f64>,
    pub nu: DVector<f64>,
    pub tau: f64,
}

#[derive(Clone, Debug)]
pub struct Reconstruction {
    /// Per input sample; `None` when it failed the preconditions.
    pub recovered: Vec<Option<Recovered>>,
    pub rejected: Vec<(usize, String)>,
    /// Deduplicated ruling lines: input indices sharing one `(g, nu)`.
    pub classes: Vec<Vec<usize>>,
    pub class_of: Vec<Option<usize>>,
}

impl Reconstruction {
    pub fn multiplicity(&self) -> usize {
        self.classes.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Representative `(g, nu)` of each class.
    pub fn lifts(&self) -> Vec<(DVector<f64>, DVector<f64>)> {
        self.classes
            .iter()
            .map(|c| {
                let r = self.recovered[c[0]].as_ref().expect("classified sample");
                (r.g.clone(), r.nu.clone())
            })
            .collect()
    }
}

fn check_sample(s: &FrontSample, tol: f64) -> std::result::Result<(), String> {
    let xi = s.normal.coords();
    if s.point.dim() != xi.len() {
        return Err("point and normal dimensions differ".into());
    }
    let e2: f64 = xi.iter().map(|x| x * x).sum();
    let null = lorentz_dot(xi, xi).abs();
    if null > tol * e2 {
        return Err(format!("normal not null (<xi, xi> = {null:e})"));
    }
    if !(xi[0] > 0.0) {
        return Err("normal not future-pointing".into());
    }
    if (e2 - 2.0).abs() > tol {
        return Err(format!("normal not E-normalised (|xi|_E^2 = {e2})"));
    }
    Ok(())
}

/// Recovers `(g, nu, tau)` from each sample and groups samples lying on the
/// same ruling line.
pub fn reconstruct_generator(samples: &[FrontSample], tol: f64) -> Reconstruction {
    let mut recovered = Vec::with_capacity(samples.len());
    let mut rejected = Vec::new();
    for (k, s) in samples.iter().enumerate() {
        match check_sample(s, tol) {
            Ok(()) => {
                let tau = s.point.height();
                let f = s.point.space();
                let nu = &s.normal.space();
                let g = DVector::from_iterator(f.len(), f.iter().zip(nu.iter()).map(|(a, b)| a - tau * b));
                recovered.push(Some(Recovered { g, nu: DVector::from_row_slice(nu), tau }));
            }
            Err(e) => {
                recovered.push(None);
                rejected.push((k, e));
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut class_of = vec![None; samples.len()];
    for k in 0..samples.len() {
        let Some(r) = &recovered[k] else { continue };
        let found = classes.iter().position(|c| {
            let q = recovered[c[0]].as_ref().unwrap();
            max_abs(&(&q.g - &r.g)).max(max_abs(&(&q.nu - &r.nu))) <= tol
        });
        match found {
            Some(c) => {
                classes[c].push(k);
                class_of[k] = Some(c);
            }
            None => {
                class_of[k] = Some(classes.len());
                classes.push(vec![k]);
            }
        }
    }
    Reconstruction { recovered, rejected, classes, class_of }
}

fn max_abs(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Evidence that a closed loop of samples covers its lift image more than once.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverReport {
    pub samples: usize,
    pub rejected: usize,
    /// Number of distinct ruling lines among the samples.
    pub distinct_rulings: usize,
    pub max_ruling_multiplicity: usize,
    /// Largest `|g|` over the recovered generator.
    pub generator_extent: f64,
    /// Turns of `nu` around the loop.
    pub normal_winding: i64,
    pub lift: LiftCheck,
    pub double_cover: bool,
}

/// Reconstructs a loop of samples (ordered along a closed parameter path) and
/// checks whether the recovered lift is injective along the loop.
pub fn loop_cover_report(samples: &[FrontSample], tol: f64) -> CoverReport {
    let rec = reconstruct_generator(samples, tol);
    let kept: Vec<&Recovered> = rec.recovered.iter().flatten().collect();
    let lifts: Vec<DVector<f64>> = kept
        .iter()
        .map(|r| DVector::from_iterator(r.g.len() * 2, r.g.iter().chain(r.nu.iter()).copied()))
        .collect();
    let m = lifts.len();
    let lift = lift_injective(&lifts, tol, |a, b| {
        let d = a.abs_diff(b);
        d <= 1 || d == m - 1
    });
    let mut winding = 0.0;
    for k in 0..m {
        let (a, b) = (&kept[k].nu, &kept[(k + 1) % m].nu);
        let cross = a[0] * b[1] - a[1] * b[0];
        winding += cross.atan2(a.dot(b));
    }
    let normal_winding = (winding / (2.0 * std::f64::consts::PI)).round() as i64;
    let generator_extent = kept.iter().map(|r| r.g.norm()).fold(0.0, f64::max);
    CoverReport {
        samples: samples.len(),
        rejected: rec.rejected.len(),
        distinct_rulings: rec.classes.len(),
        max_ruling_multiplicity: rec.multiplicity(),
        generator_extent,
        normal_winding,
        double_cover: !lift.injective && normal_winding.abs() >= 2,
        lift,
    }
}

/// One front sample that went into a patch.
#[derive(Clone, Debug, PartialEq)]
pub struct PatchInput {
    /// Index into the patch samples.
    pub sample: usize,
    pub point: LorentzVector,
    pub xi: LorentzVector,
}

/// Strongly adopted chart data of a curve-generated front: an ordered chain of
/// parameter values with `g(x) in R^2`, `nu(x) in S^1`, plus the ruling window
/// `(t_center - epsilon, t_center + epsilon)` the inputs came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Patch {
    pub params: Vec<f64>,
    pub g: Vec<[f64; 2]>,
    pub nu: Vec<[f64; 2]>,
    pub epsilon: f64,
    pub t_center: f64,
    pub closed: bool,
    pub inputs: Vec<PatchInput>,
}

impl Patch {
    pub fn new(params: Vec<f64>, g: Vec<[f64; 2]>, nu: Vec<[f64; 2]>, closed: bool) -> Result<Self> {
        if params.len() != g.len() || g.len() != nu.len() {
            return Err(CompletionError::Mismatch(format!(
                "{} params, {} positions, {} normals",
                params.len(),
                g.len(),
                nu.len()
            )));
        }
        for (k, n) in nu.iter().enumerate() {
            let dev = (n[0].hypot(n[1]) - 1.0).abs();
            if dev > RECON_TOL {
                return Err(CompletionError::Mismatch(format!("normal {k} not unit ({dev:e})")));
            }
        }
        Ok(Self { params, g, nu, epsilon: f64::INFINITY, t_center: 0.0, closed, inputs: Vec::new() })
    }

    /// Samples `front` at the given generator nodes (in chain order) and
    /// rulings, then rebuilds the patch from those samples alone.
    pub fn from_front(front: &NullFront, nodes: &[usize], ts: &[f64]) -> Result<Self> {
        if front.generator().dim() != 2 {
            return Err(CompletionError::Geometry(GeometryError::NotACurve));
        }
        let mut samples = Vec::with_capacity(nodes.len() * ts.len());
        for &i in nodes {
            for &t in ts {
                samples.push(FrontSample { point: front.point_at(t, i), normal: front.xi(i) });
            }
        }
        let labels: Vec<f64> = nodes
            .iter()
            .flat_map(|&i| std::iter::repeat_n(front.generator().node(i).param[0], ts.len()))
            .collect();
        let lo = ts.iter().cloned().fold(f64::INFINITY, f64::min) + front.shift();
        let hi = ts.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + front.shift();
        let closed = front.generator().kind() == FrontKind::ClosedCurve && nodes.len() == front.x_count();
        let mut patch = Self::from_samples(&samples, &labels, closed)?;
        patch.epsilon = 0.5 * (hi - lo);
        patch.t_center = 0.5 * (hi + lo);
        Ok(patch)
    }

    /// Builds a patch from labelled front samples. Samples on the same ruling
    /// line must carry the same label; labels order the chain.
    pub fn from_samples(samples: &[FrontSample], labels: &[f64], closed: bool) -> Result<Self> {
        if samples.len() != labels.len() {
            return Err(CompletionError::Mismatch("one label per sample required".into()));
        }
        let rec = reconstruct_generator(samples, RECON_TOL);
        if let Some((k, why)) = rec.rejected.first() {
            return Err(CompletionError::Mismatch(format!("sample {k} rejected: {why}")));
        }
        // Chain order follows first appearance of each label.
        let mut params: Vec<f64> = Vec::new();
        let mut g: Vec<[f64; 2]> = Vec::new();
        let mut nu: Vec<[f64; 2]> = Vec::new();
        let mut inputs = Vec::with_capacity(samples.len());
        for (k, s) in samples.iter().enumerate() {
            let r = rec.recovered[k].as_ref().expect("accepted");
            let idx = match params.iter().position(|p| *p == labels[k]) {
                Some(idx) => {
                    let dg = (g[idx][0] - r.g[0]).abs().max((g[idx][1] - r.g[1]).abs());
                    let dn = (nu[idx][0] - r.nu[0]).abs().max((nu[idx][1] - r.nu[1]).abs());
                    if dg.max(dn) > RECON_TOL {
                        return Err(CompletionError::Mismatch(format!(
                            "samples labelled {} lie on different rulings",
                            labels[k]
                        )));
                    }
                    idx
                }
                None => {
                    params.push(labels[k]);
                    g.push([r.g[0], r.g[1]]);
                    nu.push([r.nu[0], r.nu[1]]);
                    params.len() - 1
                }
            };
            inputs.push(PatchInput { sample: idx, point: s.point.clone(), xi: s.normal.clone() });
        }
        let mut patch = Self::new(params, g, nu, closed)?;
        let taus: Vec<f64> = samples.iter().map(|s| s.point.height()).collect();
        let (lo, hi) = taus.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &t| (a.min(t), b.max(t)));
        patch.epsilon = 0.5 * (hi - lo);
        patch.t_center = 0.5 * (hi + lo);
        patch.inputs = inputs;
        Ok(patch)
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn lift(&self, k: usize) -> [f64; 4] {
        [self.g[k][0], self.g[k][1], self.nu[k][0], self.nu[k][1]]
    }

    /// Mean distance between consecutive `g` samples.
    pub fn spacing(&self) -> f64 {
        let n = self.len();
        if n < 2 {
            return 0.0;
        }
        let segs = if self.closed { n } else { n - 1 };
        let total: f64 = (0..segs)
            .map(|k| {
                let (a, b) = (self.g[k], self.g[(k + 1) % n]);
                (a[0] - b[0]).hypot(a[1] - b[1])
            })
            .sum();
        total / segs as f64
    }

    /// Unit one-sided secants of the lift curve at sample `k`: backward and
    /// forward, where the neighbour exists.
    pub fn lift_secants(&self, k: usize) -> Vec<[f64; 4]> {
        let n = self.len();
        let mut out = Vec::with_capacity(2);
        let prev = if k > 0 { Some(k - 1) } else if self.closed { Some(n - 1) } else { None };
        let next = if k + 1 < n { Some(k + 1) } else if self.closed { Some(0) } else { None };
        for j in [prev, next].into_iter().flatten() {
            let (p, q) = (self.lift(k), self.lift(j));
            let d: [f64; 4] = std::array::from_fn(|i| q[i] - p[i]);
            let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                out.push(d.map(|x| x / norm));
            }
        }
        out
    }

    fn neighbours(&self, k: usize, count: usize) -> Vec<usize> {
        let n = self.len() as isize;
        let half = (count / 2) as isize;
        (-half..=half)
            .filter_map(|d| {
                let j = k as isize + d;
                if self.closed {
                    Some(j.rem_euclid(n) as usize)
                } else if (0..n).contains(&j) {
                    Some(j as usize)
                } else {
                    None
                }
            })
            .collect()
    }
}

/// Tolerances for relatedness.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RelTol {
    /// `None`: `POS_TOL_FACTOR` times the coarser patch's spacing.
    pub pos_tol: Option<f64>,
    pub nu_tol: f64,
    pub neighbours: usize,
}

impl Default for RelTol {
    fn default() -> Self {
        Self { pos_tol: None, nu_tol: NU_TOL, neighbours: NEIGHBOURS }
    }
}

impl RelTol {
    pub fn pos_tol_for(&self, u: &Patch, v: &Patch) -> f64 {
        self.pos_tol.unwrap_or_else(|| POS_TOL_FACTOR * u.spacing().max(v.spacing()))
    }
}

fn scaled(l: [f64; 4], pos: f64, nu: f64) -> [f64; 4] {
    [l[0] / pos, l[1] / pos, l[2] / nu, l[3] / nu]
}

fn dist4(a: [f64; 4], b: [f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Distance from `p` to segment `ab` and the unclamped segment coordinate.
fn point_segment(p: [f64; 4], a: [f64; 4], b: [f64; 4]) -> (f64, f64) {
    let d: [f64; 4] = std::array::from_fn(|i| b[i] - a[i]);
    let len2: f64 = d.iter().map(|x| x * x).sum();
    let raw = if len2 == 0.0 { 0.0 } else { (0..4).map(|i| (p[i] - a[i]) * d[i]).sum::<f64>() / len2 };
    let w = raw.clamp(0.0, 1.0);
    (dist4(p, std::array::from_fn(|i| a[i] + w * d[i])), raw)
}

/// Scaled distance from `p` to the lift polyline of `v`, and whether the
/// closest point is an open end of `v` approached from outside.
fn polyline_distance(p: [f64; 4], v: &Patch, pos: f64, nu: f64) -> (f64, bool) {
    let n = v.len();
    let sp = scaled(p, pos, nu);
    if n == 1 {
        return (dist4(sp, scaled(v.lift(0), pos, nu)), true);
    }
    let segs = if v.closed { n } else { n - 1 };
    let mut best = (f64::INFINITY, false);
    for k in 0..segs {
        let (d, raw) = point_segment(sp, scaled(v.lift(k), pos, nu), scaled(v.lift((k + 1) % n), pos, nu));
        if d < best.0 {
            let beyond = !v.closed && ((k == 0 && raw < 0.0) || (k + 1 == segs && raw > 1.0));
            best = (d, beyond);
        }
    }
    best
}

/// Pointwise distance of two lift samples in tolerance units.
pub fn lift_distance(u: &Patch, x: usize, v: &Patch, y: usize, tol: &RelTol) -> f64 {
    let pos = tol.pos_tol_for(u, v);
    dist4(scaled(u.lift(x), pos, tol.nu_tol), scaled(v.lift(y), pos, tol.nu_tol))
}

/// Largest chordal step between consecutive normals.
fn max_normal_step(p: &Patch) -> f64 {
    let n = p.len();
    let segs = if p.closed { n } else { n.saturating_sub(1) };
    (0..segs)
        .map(|k| {
            let (a, b) = (p.nu[k], p.nu[(k + 1) % n]);
            (a[0] - b[0]).hypot(a[1] - b[1])
        })
        .fold(0.0, f64::max)
}

fn nearest(p: [f64; 4], v: &Patch, pos: f64, nu: f64) -> f64 {
    let sp = scaled(p, pos, nu);
    (0..v.len()).map(|y| dist4(sp, scaled(v.lift(y), pos, nu))).fold(f64::INFINITY, f64::min)
}

/// `x in U` and `y in V` are related: their lifts agree within tolerance and
/// are mutually nearest, and the lift images agree near them. Each of the `k`
/// samples around `x` lies in a band around `V`'s lift polyline, and
/// symmetrically; samples past an open end of the other patch are outside the
/// common germ and skipped. The band widens the normal tolerance to the
/// polyline's own sagitta.
pub fn related(u: &Patch, x: usize, v: &Patch, y: usize, tol: &RelTol) -> bool {
    let pos = tol.pos_tol_for(u, v);
    let d = lift_distance(u, x, v, y, tol);
    if d > 1.0 {
        return false;
    }
    let d_raw = d;
    if nearest(u.lift(x), v, pos, tol.nu_tol) < d_raw || nearest(v.lift(y), u, pos, tol.nu_tol) < d_raw {
        return false;
    }
    let step = max_normal_step(u).max(max_normal_step(v));
    let band = tol.nu_tol.max(0.25 * step * step);
    let near = |a: &Patch, k: usize, b: &Patch| {
        a.neighbours(k, tol.neighbours).into_iter().all(|j| {
            let (dist, beyond) = polyline_distance(a.lift(j), b, pos, band);
            beyond || dist <= 1.0
        })
    };
    near(u, x, v) && near(v, y, u)
}

fn ruling_gap(u: &Patch, x: usize, v: &Patch, y: usize) -> f64 {
    [-1.0, 0.0, 1.0]
        .iter()
        .flat_map(|&t| (0..2).map(move |i| ((u.g[x][i] + t * u.nu[x][i]) - (v.g[y][i] + t * v.nu[y][i])).abs()))
        .fold(0.0, f64::max)
}

/// The ruling lines through `x` and `y` coincide (pointwise line test, no
/// neighbourhood condition).
pub fn rulings_coincide(u: &Patch, x: usize, v: &Patch, y: usize, tol: f64) -> bool {
    ruling_gap(u, x, v, y) <= tol
}

/// Global identifier of a patch sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SampleId {
    pub patch: usize,
    pub sample: usize,
}

/// Related pairs between two patches, plus pointwise-close pairs that fail the
/// neighbourhood condition.
type IndexPairs = Vec<(usize, usize)>;

fn pair_relations(u: &Patch, v: &Patch, tol: &RelTol) -> (IndexPairs, IndexPairs) {
    let mut rel = Vec::new();
    let mut close_only = Vec::new();
    for x in 0..u.len() {
        for y in 0..v.len() {
            if lift_distance(u, x, v, y, tol) <= 1.0 {
                if related(u, x, v, y, tol) {
                    rel.push((x, y));
                } else {
                    close_only.push((x, y));
                }
            }
        }
    }
    (rel, close_only)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleClass {
    pub members: Vec<SampleId>,
    pub param: f64,
    pub g: [f64; 2],
    pub nu: [f64; 2],
}

/// A connected piece of the quotient, as an ordered chain of classes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Component {
    pub classes: Vec<usize>,
    pub closed: bool,
}

/// Index correspondence `phi_{V,U}` on the overlap of two patches.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    pub map: Vec<(usize, usize)>,
    /// `max |l_U(x) - l_V(phi(x))|` over the map.
    pub max_lift_error: f64,
}

#[derive(Clone, Debug)]
pub struct Atlas {
    pub patches: Vec<Patch>,
    /// `class_of[p][k]` for sample `k` of patch `p`.
    pub class_of: Vec<Vec<usize>>,
    pub classes: Vec<SampleClass>,
    pub components: Vec<Component>,
    pub transitions: Vec<Transition>,
    /// Largest lift spread inside one class.
    pub max_class_spread: f64,
    /// `max |L_F - L_G o Phi|` over all patch inputs.
    pub lift_violation: f64,
    /// Largest ruling-line mismatch over transition pairs, at `t` in {-1, 0, 1}.
    pub ruling_mismatch: f64,
    pub tol: RelTol,
}

/// Glues patches along related samples (union-find closure) and builds the
/// quotient chain(s). Fails when some class has more than two neighbouring
/// classes: the quotient would branch, i.e. not be Hausdorff.
pub fn glue(patches: Vec<Patch>, tol: RelTol) -> Result<Atlas> {
    if patches.is_empty() {
        return Err(CompletionError::NoPatches);
    }
    if let Some(p) = patches.iter().position(Patch::is_empty) {
        return Err(CompletionError::EmptyPatch(p));
    }
    let offsets: Vec<usize> = patches
        .iter()
        .scan(0, |acc, p| {
            let o = *acc;
            *acc += p.len();
            Some(o)
        })
        .collect();
    let total: usize = patches.iter().map(Patch::len).sum();
    let id = |p: usize, k: usize| offsets[p] + k;
    let mut uf = UnionFind::<usize>::new(total);
    let mut relations = Vec::new();
    let mut suspects = Vec::new();
    for a in 0..patches.len() {
        for b in a + 1..patches.len() {
            let (rel, close) = pair_relations(&patches[a], &patches[b], &tol);
            for &(x, y) in &rel {
                uf.union(id(a, x), id(b, y));
            }
            suspects.extend(close.into_iter().map(|(x, y)| (SampleId { patch: a, sample: x }, SampleId { patch: b, sample: y })));
            relations.push((a, b, rel));
        }
    }

    // Dense class numbering in order of first appearance.
    let labels = uf.into_labeling();
    let mut dense = vec![usize::MAX; total];
    let mut classes: Vec<SampleClass> = Vec::new();
    let mut class_of: Vec<Vec<usize>> = Vec::with_capacity(patches.len());
    for (p, patch) in patches.iter().enumerate() {
        let mut row = Vec::with_capacity(patch.len());
        for k in 0..patch.len() {
            let root = labels[id(p, k)];
            if dense[root] == usize::MAX {
                dense[root] = classes.len();
                classes.push(SampleClass { members: Vec::new(), param: patch.params[k], g: patch.g[k], nu: patch.nu[k] });
            }
            let c = dense[root];
            classes[c].members.push(SampleId { patch: p, sample: k });
            row.push(c);
        }
        class_of.push(row);
    }

    let mut spread: f64 = 0.0;
    for c in &classes {
        let first = patches[c.members[0].patch].lift(c.members[0].sample);
        for m in &c.members[1..] {
            spread = spread.max(dist4(first, patches[m.patch].lift(m.sample)));
        }
    }

    // Quotient graph from consecutive samples inside each patch.
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); classes.len()];
    let mut witness: Vec<Vec<(SampleId, SampleId)>> = vec![Vec::new(); classes.len()];
    for (p, patch) in patches.iter().enumerate() {
        let n = patch.len();
        let segs = if patch.closed { n } else { n.saturating_sub(1) };
        for k in 0..segs {
            let (a, b) = (class_of[p][k], class_of[p][(k + 1) % n]);
            if a == b {
                continue;
            }
            let (sa, sb) = (SampleId { patch: p, sample: k }, SampleId { patch: p, sample: (k + 1) % n });
            if !adj[a].contains(&b) {
                adj[a].push(b);
                witness[a].push((sa, sb));
            }
            if !adj[b].contains(&a) {
                adj[b].push(a);
                witness[b].push((sb, sa));
            }
        }
    }
    let branching: Vec<usize> = (0..classes.len()).filter(|&c| adj[c].len() > 2).collect();
    if !branching.is_empty() {
        let mut pairs: Vec<(SampleId, SampleId)> = branching.iter().flat_map(|&c| witness[c].clone()).collect();
        pairs.extend(suspects);
        pairs.sort();
        pairs.dedup();
        return Err(CompletionError::NonHausdorff { pairs });
    }

    let components = chains(&adj);
    let transitions = relations
        .into_iter()
        .filter(|(_, _, r)| !r.is_empty())
        .map(|(a, b, map)| {
            let err = map.iter().map(|&(x, y)| dist4(patches[a].lift(x), patches[b].lift(y))).fold(0.0, f64::max);
            Transition { from: a, to: b, map, max_lift_error: err }
        })
        .collect();

    let mut atlas = Atlas {
        patches,
        class_of,
        classes,
        components,
        transitions,
        max_class_spread: spread,
        lift_violation: 0.0,
        ruling_mismatch: 0.0,
        tol,
    };
    atlas.ruling_mismatch = atlas
        .transitions
        .iter()
        .flat_map(|tr| tr.map.iter().map(move |&(x, y)| (tr.from, x, tr.to, y)))
        .map(|(a, x, b, y)| ruling_gap(&atlas.patches[a], x, &atlas.patches[b], y))
        .fold(0.0, f64::max);
    atlas.lift_violation = atlas.verify_lift()?;
    Ok(atlas)
}

/// Orders each connected component of a graph with degrees <= 2.
fn chains(adj: &[Vec<usize>]) -> Vec<Component> {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    // Open chains first start at an endpoint.
    let starts: Vec<usize> = (0..n).filter(|&c| adj[c].len() < 2).chain(0..n).collect();
    for s in starts {
        if seen[s] {
            continue;
        }
        let mut order = vec![s];
        seen[s] = true;
        let mut prev = usize::MAX;
        let mut cur = s;
        loop {
            let next = adj[cur].iter().copied().find(|&x| x != prev && !seen[x]);
            match next {
                Some(x) => {
                    seen[x] = true;
                    order.push(x);
                    prev = cur;
                    cur = x;
                }
                None => break,
            }
        }
        let closed = order.len() > 2 && adj[cur].contains(&s);
        out.push(Component { classes: order, closed });
    }
    out
}

impl Atlas {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// `Sigma_F` is one closed curve.
    pub fn is_single_closed_curve(&self) -> bool {
        self.components.len() == 1 && self.components[0].closed
    }

    /// The completed generator of one component as a patch in chain order.
    pub fn completed_patch(&self, component: usize) -> Patch {
        let comp = &self.components[component];
        let mut p = Patch {
            params: comp.classes.iter().map(|&c| self.classes[c].param).collect(),
            g: comp.classes.iter().map(|&c| self.classes[c].g).collect(),
            nu: comp.classes.iter().map(|&c| self.classes[c].nu).collect(),
            epsilon: f64::INFINITY,
            t_center: 0.0,
            closed: comp.closed,
            inputs: Vec::new(),
        };
        if comp.closed {
            p.closed = true;
        }
        p
    }

    /// The completed generator of one component, sampled with the recovered
    /// normals. Parameters are re-spaced uniformly in chain order.
    pub fn generator(&self, component: usize) -> Result<GeneratingFront> {
        let p = self.completed_patch(component);
        let n = p.len();
        let domain = if p.closed {
            CurveDomain::Closed { start: 0.0, period: n as f64 }
        } else {
            CurveDomain::Open { start: 0.0, end: (n.max(2) - 1) as f64 }
        };
        Ok(GeneratingFront::curve_from_samples(p.g, Some(p.nu), domain)?)
    }

    /// Rebuilds every input through the normal form `G` of the completed
    /// generator and returns `max |L_F - L_G o Phi|` (point and null normal).
    fn verify_lift(&self) -> Result<f64> {
        let mut position = vec![(0usize, 0usize); self.classes.len()];
        for (ci, comp) in self.components.iter().enumerate() {
            for (k, &c) in comp.classes.iter().enumerate() {
                position[c] = (ci, k);
            }
        }
        let fronts: Vec<Option<NullFront>> = (0..self.components.len())
            .map(|ci| {
                if self.components[ci].classes.len() < crate::diff::MIN_LINE {
                    return None;
                }
                let g = self.generator(ci).ok()?;
                NullFront::normal_form(std::sync::Arc::new(g), Sigma::Plus, (-1.0, 1.0), 2).ok()
            })
            .collect();
        let mut worst: f64 = 0.0;
        for (p, patch) in self.patches.iter().enumerate() {
            for input in &patch.inputs {
                let c = self.class_of[p][input.sample];
                let (ci, k) = position[c];
                let t = input.point.height();
                let (point, xi) = match &fronts[ci] {
                    Some(f) => (f.point_at(t, k), f.xi(k)),
                    None => {
                        let cl = &self.classes[c];
                        (
                            LorentzVector::from(DVector::from_vec(vec![t, cl.g[0] + t * cl.nu[0], cl.g[1] + t * cl.nu[1]])),
                            LorentzVector::from(DVector::from_vec(vec![1.0, cl.nu[0], cl.nu[1]])),
                        )
                    }
                };
                worst = worst.max(point.max_abs_diff(&input.point)).max(xi.max_abs_diff(&input.xi));
            }
        }
        Ok(worst)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Admissibility {
    /// Some samples are related; no unrelated contact.
    Related,
    /// Lift images stay apart.
    Disjoint,
    /// Every contact between unrelated samples is transversal.
    Admissible,
    /// Some unrelated contact is tangential.
    Inadmissible,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Contact {
    pub u_sample: usize,
    pub v_sample: usize,
    pub distance: f64,
    /// Angle between the lift tangent lines.
    pub angle: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub related_pairs: usize,
    pub contacts: Vec<Contact>,
    pub min_angle: Option<f64>,
    pub verdict: Admissibility,
}

/// Angle between two lines through unit vectors `a` and `b`, stable near zero.
fn line_angle(a: [f64; 4], b: [f64; 4]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let s = if dot < 0.0 { -1.0 } else { 1.0 };
    let chord = dist4(a, b.map(|x| s * x));
    2.0 * (0.5 * chord).min(1.0).asin()
}

/// Smallest angle between one-sided lift secants of `U` at `x` and `V` at
/// `y`. A contact is tangential when either side of the sampled curves is.
fn secant_angle(u: &Patch, x: usize, v: &Patch, y: usize) -> f64 {
    let (a, b) = (u.lift_secants(x), v.lift_secants(y));
    a.iter().flat_map(|p| b.iter().map(move |q| line_angle(*p, *q))).fold(std::f64::consts::FRAC_PI_2, f64::min)
}

/// Looks for near-intersections (Euclidean lift distance below the positional
/// tolerance) between samples of `U` and `V` that are not related to anything
/// in the other patch, and measures the angle between the lift tangents there.
pub fn admissibility_check(u: &Patch, v: &Patch, tol: &RelTol, angle_threshold: f64) -> AdmissibilityReport {
    let (rel, _) = pair_relations(u, v, tol);
    let mut u_rel = vec![false; u.len()];
    let mut v_rel = vec![false; v.len()];
    for &(x, y) in &rel {
        u_rel[x] = true;
        v_rel[y] = true;
    }
    let contact_tol = tol.pos_tol_for(u, v);
    let mut contacts = Vec::new();
    for x in (0..u.len()).filter(|&x| !u_rel[x]) {
        // Closest unrelated sample of V.
        let best = (0..v.len())
            .filter(|&y| !v_rel[y])
            .map(|y| (y, dist4(u.lift(x), v.lift(y))))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((y, d)) = best {
            if d < contact_tol {
                contacts.push(Contact { u_sample: x, v_sample: y, distance: d, angle: secant_angle(u, x, v, y) });
            }
        }
    }
    let min_angle = contacts.iter().map(|c| c.angle).min_by(f64::total_cmp);
    let verdict = match (contacts.is_empty(), rel.is_empty()) {
        (true, true) => Admissibility::Disjoint,
        (true, false) => Admissibility::Related,
        (false, _) if min_angle.unwrap() < angle_threshold => Admissibility::Inadmissible,
        (false, _) => Admissibility::Admissible,
    };
    AdmissibilityReport { related_pairs: rel.len(), contacts, min_angle, verdict }
}
