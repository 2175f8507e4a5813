//! Singular locus of a normal-form front and its classification.
//!
//! `dF` drops rank exactly where `1 - t sigma lambda_i(x) = 0`, so the locus is
//! `{(sigma / lambda_i(x), x)}`. For plane curves the image is the curve
//! `C(s) = F(sigma / kappa(s), s)` and `C'(s) = -kappa'/kappa^2 (1, sigma nu)`:
//! a singular point is a cuspidal edge iff `kappa'(s) != 0`, and the
//! non-cuspidal ones sit over the vertices of the generator.

use nalgebra::DVector;
use serde::Serialize;

use crate::diff;
use crate::frontgen::{NullFront, SINGULAR_REL};
use crate::geometry::{self, CurvatureData, FrontKind, GeneratingFront, GeometryError, VertexScan, VERTEX_ZERO_REL};
use crate::lorentz::LorentzVector;

/// A principal curvature counts as zero when
/// `|lambda| < LAMBDA_ZERO_REL * max |lambda|`.
pub const LAMBDA_ZERO_REL: f64 = 1e-6;
/// Vertices closer than this fraction of the grid step to a node replace it.
pub const VERTEX_MERGE_REL: f64 = 1e-6;
/// `kappa''` threshold (relative to its maximum) for the swallowtail annotation.
pub const SWALLOWTAIL_REL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointClass {
    /// Not classified (surfaces, or before [`classify`]).
    Unclassified,
    CuspidalEdge,
    /// `degenerate`: `kappa'' = 0` as well (or constant curvature);
    /// `swallowtail`: the generic expectation when `kappa'' != 0`.
    NonCuspidal { degenerate: bool, swallowtail: bool },
    /// The `kappa'` test and the `C'` test disagree.
    Undetermined { kappa_test: bool, velocity_test: bool },
}

impl PointClass {
    pub fn label(&self) -> &'static str {
        match self {
            PointClass::Unclassified => "unclassified",
            PointClass::CuspidalEdge => "cuspidal-edge",
            PointClass::NonCuspidal { degenerate: true, .. } => "non-cuspidal-degenerate",
            PointClass::NonCuspidal { swallowtail: true, .. } => "non-cuspidal-swallowtail",
            PointClass::NonCuspidal { .. } => "non-cuspidal",
            PointClass::Undetermined { .. } => "undetermined",
        }
    }

    pub fn is_non_cuspidal(&self) -> bool {
        matches!(self, PointClass::NonCuspidal { .. })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocusPoint {
    pub param: Vec<f64>,
    /// Grid node, or `None` for a refined vertex between nodes.
    pub node: Option<usize>,
    pub branch: usize,
    /// Lattice-relative ruling parameter: `F(t, x)` is singular.
    pub t: f64,
    pub image: LorentzVector,
    pub lambda: f64,
    /// Whether the point came from the vertex scan.
    pub vertex: bool,
    pub class: PointClass,
}

/// A run of consecutive nodes where a branch is too close to zero for
/// `1 / lambda` to be meaningful; the locus escapes to infinity there.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnboundedArc {
    pub branch: usize,
    pub nodes: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct SingularLocus {
    pub points: Vec<LocusPoint>,
    pub constant_curvature: bool,
    pub unbounded: Vec<UnboundedArc>,
    pub curvature: CurvatureData,
    pub vertices: Option<VertexScan>,
}

impl SingularLocus {
    pub fn non_cuspidal(&self) -> impl Iterator<Item = &LocusPoint> {
        self.points.iter().filter(|p| p.class.is_non_cuspidal())
    }

    pub fn non_cuspidal_count(&self) -> usize {
        self.non_cuspidal().count()
    }

    pub fn count(&self, label: &str) -> usize {
        self.points.iter().filter(|p| p.class.label() == label).count()
    }

    /// Maximal runs of consecutive cuspidal-edge points (cyclic for closed
    /// generators).
    pub fn cuspidal_arcs(&self, closed: bool) -> usize {
        let cusp: Vec<bool> = self.points.iter().map(|p| p.class == PointClass::CuspidalEdge).collect();
        if cusp.is_empty() {
            return 0;
        }
        if cusp.iter().all(|&c| c) {
            return 1;
        }
        let n = cusp.len();
        (0..n)
            .filter(|&i| {
                cusp[i] && {
                    let prev = if i == 0 {
                        if closed { Some(n - 1) } else { None }
                    } else {
                        Some(i - 1)
                    };
                    prev.is_none_or(|p| !cusp[p])
                }
            })
            .count()
    }
}

/// Lattice-relative ruling at which `lambda` makes `dF` singular.
fn ruling_of(front: &NullFront, lambda: f64) -> f64 {
    front.sigma().sign() / lambda - front.shift()
}

/// Points `(sigma / lambda_i(x), x)` for every node and branch with
/// `lambda_i(x)` bounded away from zero. For closed-form curves the refined
/// vertex parameters are inserted (replacing nodes they coincide with); for
/// sampled curves vertices snap to the nearest node.
pub fn singular_locus(front: &NullFront) -> Result<SingularLocus, GeometryError> {
    let g = front.generator();
    let curvature = geometry::curvature(g)?;
    let branches = curvature.branch_count();
    let lmax = curvature.principal.iter().flatten().fold(0.0_f64, |m, l| m.max(l.abs()));
    let cutoff = LAMBDA_ZERO_REL * lmax;

    let mut points = Vec::new();
    let mut unbounded = Vec::new();
    for b in 0..branches {
        let mut skipped = Vec::new();
        for (i, ls) in curvature.principal.iter().enumerate() {
            let lambda = ls[b];
            if lambda.abs() < cutoff || lmax == 0.0 {
                skipped.push(i);
                continue;
            }
            let t = ruling_of(front, lambda);
            points.push(LocusPoint {
                param: g.node(i).param.clone(),
                node: Some(i),
                branch: b,
                t,
                image: front.point_at(t, i),
                lambda,
                vertex: false,
                class: PointClass::Unclassified,
            });
        }
        unbounded.extend(split_runs(&skipped, g).into_iter().map(|nodes| UnboundedArc { branch: b, nodes }));
        if g.kind().is_curve() {
            // Sign changes between nodes: 1/lambda passes through infinity.
            let n = g.len();
            let pairs = if g.kind().is_closed() { n } else { n - 1 };
            for i in 0..pairs {
                let j = (i + 1) % n;
                let (a, c) = (curvature.principal[i][b], curvature.principal[j][b]);
                if a.abs() >= cutoff && c.abs() >= cutoff && a.signum() != c.signum() {
                    unbounded.push(UnboundedArc { branch: b, nodes: vec![i, j] });
                }
            }
        }
    }

    let mut vertices = None;
    let mut constant_curvature = false;
    if g.kind().is_curve() {
        let scan = geometry::vertices(g, &curvature)?;
        constant_curvature = scan == VertexScan::ConstantCurvature;
        let h = g.spacing();
        for v in scan.vertices() {
            if v.kappa.abs() < cutoff {
                continue;
            }
            let t = ruling_of(front, v.kappa);
            let nearest = nearest_node(g, v.param);
            let on_node = v.node.is_some() || (g.node(nearest).param[0] - v.param).abs() <= VERTEX_MERGE_REL * h;
            if on_node || g.analytic().is_none() {
                let i = v.node.unwrap_or(nearest);
                if let Some(p) = points.iter_mut().find(|p| p.node == Some(i)) {
                    p.vertex = true;
                }
                continue;
            }
            let image = front.evaluate(t, &[v.param]).expect("analytic generator");
            points.push(LocusPoint {
                param: vec![v.param],
                node: None,
                branch: 0,
                t,
                image,
                lambda: v.kappa,
                vertex: true,
                class: PointClass::Unclassified,
            });
        }
        points.sort_by(|a, b| a.param[0].total_cmp(&b.param[0]));
        vertices = Some(scan);
    }
    Ok(SingularLocus { points, constant_curvature, unbounded, curvature, vertices })
}

fn nearest_node(g: &GeneratingFront, s: f64) -> usize {
    let axis = g.axes()[0];
    let k = ((s - axis.start) / axis.step).round();
    if axis.periodic {
        (k as i64).rem_euclid(axis.len as i64) as usize
    } else {
        (k.max(0.0) as usize).min(axis.len - 1)
    }
}

fn split_runs(nodes: &[usize], g: &GeneratingFront) -> Vec<Vec<usize>> {
    let mut runs: Vec<Vec<usize>> = Vec::new();
    for &i in nodes {
        match runs.last_mut() {
            Some(r) if g.grid_adjacent(*r.last().unwrap(), i) && g.axes().len() == 1 => r.push(i),
            _ => runs.push(vec![i]),
        }
    }
    // Join a run wrapping around a closed curve.
    if runs.len() > 1 && g.kind() == FrontKind::ClosedCurve {
        let first = runs[0][0];
        let last = *runs.last().unwrap().last().unwrap();
        if first == 0 && last == g.len() - 1 {
            let head = runs.remove(0);
            runs.last_mut().unwrap().extend(head);
        }
    }
    runs
}

/// Classifies plane-curve locus points by two independent criteria that must
/// agree: "the point lies over a detected vertex" and "`C'(s) = 0`".
///
/// `C'` comes from differentiating `C(s) = F(sigma/kappa(s), s)` on jets for
/// closed-form generators, and from finite differences of the sampled locus
/// image (projected on the ruling direction, zero located by sign change)
/// otherwise.
pub fn classify(mut locus: SingularLocus, front: &NullFront) -> SingularLocus {
    let g = front.generator();
    if !g.kind().is_curve() {
        return locus;
    }
    if locus.constant_curvature {
        for p in &mut locus.points {
            p.class = PointClass::NonCuspidal { degenerate: true, swallowtail: false };
        }
        return locus;
    }
    let dk = locus.curvature.dkappa.clone().unwrap_or_default();
    let d2k = locus.curvature.d2kappa.clone().unwrap_or_default();
    let dmax = dk.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let d2max = d2k.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let sigma = front.sigma().sign();

    let velocity_zero: Vec<bool> = match g.analytic() {
        Some(_) => locus
            .points
            .iter()
            .map(|p| {
                let speed = locus_velocity(g, sigma, p.param[0]).norm();
                // |C'| kappa^2 / sqrt 2 = |kappa'|; compare on the kappa' scale.
                speed * p.lambda * p.lambda / std::f64::consts::SQRT_2 <= VERTEX_ZERO_REL * dmax
            })
            .collect(),
        None => sampled_velocity_zeros(&locus, g, sigma),
    };

    for (p, vz) in locus.points.iter_mut().zip(velocity_zero) {
        // A vertex, or a point on an arc where kappa' vanishes identically.
        let dk_here = match (g.curve_jets_at(p.param[0]), p.node) {
            (Some(j), _) => j.kappa.derivative_value(1),
            (None, Some(i)) => dk[i],
            (None, None) => 0.0,
        };
        let kz = p.vertex || dk_here.abs() <= VERTEX_ZERO_REL * dmax;
        p.class = match (kz, vz) {
            (true, true) => {
                let k2 = match (g.curve_jets_at(p.param[0]), p.node) {
                    (Some(j), _) => j.kappa.derivative_value(2),
                    (None, Some(i)) => d2k[i],
                    (None, None) => 0.0,
                };
                let degenerate = k2.abs() <= SWALLOWTAIL_REL * d2max;
                PointClass::NonCuspidal { degenerate, swallowtail: !degenerate }
            }
            (false, false) => PointClass::CuspidalEdge,
            (kappa_test, velocity_test) => PointClass::Undetermined { kappa_test, velocity_test },
        };
    }
    locus
}

/// `C'(s)` for a closed-form curve, by differentiating
/// `(sigma/kappa, f + nu/kappa)` on jets.
pub fn locus_velocity(g: &GeneratingFront, sigma: f64, s: f64) -> DVector<f64> {
    let j = g.curve_jets_at(s).expect("closed-form curve");
    let r = j.kappa.recip();
    let t = r * sigma;
    let x = j.position[0] + r * j.normal[0];
    let y = j.position[1] + r * j.normal[1];
    DVector::from_vec(vec![t.derivative_value(1), x.derivative_value(1), y.derivative_value(1)])
}

fn sampled_velocity_zeros(locus: &SingularLocus, g: &GeneratingFront, sigma: f64) -> Vec<bool> {
    let axis = g.axes()[0];
    let n = g.len();
    let pts = &locus.points;
    if pts.len() != n {
        // Nodes were dropped (unbounded arcs); fall back to node-wise zeros only.
        return pts.iter().map(|_| false).collect();
    }
    let images: Vec<DVector<f64>> = pts.iter().map(|p| p.image.as_dvector().clone()).collect();
    let vel = diff::first(&images, axis.step, axis.boundary());
    // Component of C' along the ruling direction xi = (1, sigma nu).
    let c: Vec<f64> = pts
        .iter()
        .zip(&vel)
        .map(|(p, v)| {
            let i = p.node.expect("sampled locus is node-aligned");
            let nu = &g.node(i).normal;
            let xi_space = nu * sigma;
            0.5 * (v[0] + xi_space.dot(&v.rows(1, nu.len())))
        })
        .collect();
    let cmax = c.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let mut zero = vec![false; n];
    for i in 0..n {
        if c[i].abs() <= VERTEX_ZERO_REL * cmax {
            zero[i] = true;
        }
    }
    let pairs = if axis.periodic { n } else { n - 1 };
    for i in 0..pairs {
        let j = (i + 1) % n;
        if zero[i] || zero[j] || c[i].signum() == c[j].signum() {
            continue;
        }
        let w = c[i] / (c[i] - c[j]);
        zero[if w < 0.5 { i } else { j }] = true;
    }
    zero
}

/// Locus plus classification.
pub fn analyze(front: &NullFront) -> Result<SingularLocus, GeometryError> {
    Ok(classify(singular_locus(front)?, front))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Complete,
    Incomplete,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompletenessReport {
    pub nonempty: bool,
    pub compact_domain: bool,
    /// Per branch: `min |lambda_i| >= LAMBDA_ZERO_REL * max |lambda|`.
    pub branches_bounded: Vec<bool>,
    pub sign_constant: Vec<bool>,
    pub same_sign: bool,
    pub verdict: Verdict,
    pub reasons: Vec<String>,
}

/// Non-empty compact singular set: the parameter domain must be compact and
/// every principal curvature bounded away from zero; sign constancy per branch
/// and across branches is reported alongside.
pub fn completeness_check(front: &NullFront) -> Result<CompletenessReport, GeometryError> {
    let g = front.generator();
    let data = geometry::curvature(g)?;
    let branches = data.branch_count();
    let lmax = data.principal.iter().flatten().fold(0.0_f64, |m, l| m.max(l.abs()));
    let mut bounded = Vec::new();
    let mut constant = Vec::new();
    let mut signs = Vec::new();
    for b in 0..branches {
        let vals: Vec<f64> = data.principal.iter().map(|p| p[b]).collect();
        let min = vals.iter().fold(f64::INFINITY, |m, l| m.min(l.abs()));
        bounded.push(lmax > 0.0 && min >= LAMBDA_ZERO_REL * lmax);
        let pos = vals.iter().all(|&l| l > 0.0);
        let neg = vals.iter().all(|&l| l < 0.0);
        constant.push(pos || neg);
        signs.push(if pos { 1 } else if neg { -1 } else { 0 });
    }
    let nonempty = lmax > 0.0;
    let compact_domain = g.kind().is_closed();
    let same_sign = signs.iter().all(|&s| s != 0 && s == signs[0]);
    let mut reasons = Vec::new();
    if !nonempty {
        reasons.push("singular set empty: all principal curvatures vanish".to_string());
    }
    if !compact_domain {
        reasons.push("parameter domain not compact".to_string());
    }
    for (b, (ok, constant)) in bounded.iter_mut().zip(&constant).enumerate() {
        if !*constant && !signs.is_empty() {
            // A continuous branch that changes sign vanishes somewhere between
            // nodes even if no node sees a small value.
            *ok = false;
            reasons.push(format!("branch {b} changes sign: unbounded singular set"));
        } else if !*ok {
            reasons.push(format!("branch {b} approaches zero: unbounded singular set"));
        }
    }
    if constant.iter().all(|&c| c) && !same_sign {
        reasons.push("principal curvatures have different signs".to_string());
    }
    let verdict = if nonempty && compact_domain && bounded.iter().all(|&b| b) {
        Verdict::Complete
    } else {
        Verdict::Incomplete
    };
    Ok(CompletenessReport { nonempty, compact_domain, branches_bounded: bounded, sign_constant: constant, same_sign, verdict, reasons })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuditOutcome {
    /// Hypotheses met and at least four non-cuspidal points found.
    Holds,
    /// Hypotheses met but fewer than four: a counterexample (or a bug).
    Violated,
    /// Some hypothesis fails, so nothing is implied.
    NotApplicable,
    /// Constant curvature: every point is non-cuspidal.
    Excluded,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FourVertexAudit {
    pub embedded: bool,
    pub complete: bool,
    pub constant_curvature: bool,
    pub non_cuspidal_count: usize,
    pub outcome: AuditOutcome,
}

/// Checks "embedded closed generator of a complete front => at least four
/// non-cuspidal singular points" on one instance.
pub fn four_vertex_audit(front: &NullFront) -> Result<FourVertexAudit, GeometryError> {
    let g = front.generator();
    if !g.kind().is_curve() {
        return Err(GeometryError::NotACurve);
    }
    let locus = analyze(front)?;
    let complete = completeness_check(front)?.verdict == Verdict::Complete;
    let embedded = g.kind() == FrontKind::ClosedCurve && self_intersections(g).is_empty();
    let count = locus.non_cuspidal_count();
    let outcome = if locus.constant_curvature {
        AuditOutcome::Excluded
    } else if !(embedded && complete) {
        AuditOutcome::NotApplicable
    } else if count >= 4 {
        AuditOutcome::Holds
    } else {
        AuditOutcome::Violated
    };
    Ok(FourVertexAudit {
        embedded,
        complete,
        constant_curvature: locus.constant_curvature,
        non_cuspidal_count: if locus.constant_curvature { locus.points.len() } else { count },
        outcome,
    })
}

/// Pairs of non-adjacent polyline segments of a curve generator that cross.
pub fn self_intersections(g: &GeneratingFront) -> Vec<(usize, usize)> {
    let n = g.len();
    let closed = g.kind() == FrontKind::ClosedCurve;
    let segs = if closed { n } else { n - 1 };
    let p = |i: usize| {
        let v = &g.node(i % n).position;
        (v[0], v[1])
    };
    let mut out = Vec::new();
    for a in 0..segs {
        for b in a + 2..segs {
            if closed && a == 0 && b == segs - 1 {
                continue;
            }
            if segments_cross(p(a), p(a + 1), p(b), p(b + 1)) {
                out.push((a, b));
            }
        }
    }
    out
}

fn segments_cross(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)) -> bool {
    let orient = |p: (f64, f64), q: (f64, f64), r: (f64, f64)| (q.0 - p.0) * (r.1 - p.1) - (q.1 - p.1) * (r.0 - p.0);
    let (d1, d2) = (orient(c, d, a), orient(c, d, b));
    let (d3, d4) = (orient(a, b, c), orient(a, b, d));
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// Rank-drop scan of the whole `(t, x)` lattice for plane-curve fronts. At
/// each sample `dF = [xi, F_s]` with `F_s = f' + t sigma nu'` taken from the
/// generator's node derivatives (closed-form jets, or finite differences for
/// sampled curves). A sample is flagged when `dF` is numerically singular
/// there or when `F_s` reverses direction across the adjacent t-cell (the
/// rank drops inside it); then the endpoint with the smaller
/// `sigma_min(dF)` is flagged. No curvature is computed.
#[derive(Clone, Debug, PartialEq)]
pub struct BruteForceScan {
    /// Flagged lattice samples `(j, i)`.
    pub flagged: Vec<(usize, usize)>,
}

pub fn brute_force_singular_scan(front: &NullFront) -> Result<BruteForceScan, GeometryError> {
    let g = front.generator();
    if !g.kind().is_curve() {
        return Err(GeometryError::NotACurve);
    }
    let (m, n) = (front.t_count(), front.x_count());
    let sigma = front.sigma().sign();
    let mut flagged = Vec::new();
    for i in 0..n {
        let node = g.node(i);
        let xi = front.xi(i);
        let fs: Vec<DVector<f64>> = (0..m)
            .map(|j| {
                let t = front.t_value(j) + front.shift();
                let mut v = DVector::zeros(3);
                for k in 0..2 {
                    v[k + 1] = node.tangents[0][k] + t * sigma * node.normal_derivs[0][k];
                }
                v
            })
            .collect();
        let smin: Vec<f64> = fs.iter().map(|v| sigma_ratio(xi.as_dvector(), v)).collect();
        let mut marks: Vec<bool> = smin.iter().map(|&r| r <= SINGULAR_REL).collect();
        for j in 0..m - 1 {
            if fs[j].dot(&fs[j + 1]) < 0.0 {
                let k = if smin[j] <= smin[j + 1] { j } else { j + 1 };
                marks[k] = true;
            }
        }
        flagged.extend(marks.iter().enumerate().filter(|(_, &f)| f).map(|(j, _)| (j, i)));
    }
    flagged.sort();
    Ok(BruteForceScan { flagged })
}

/// `sigma_min / sigma_max` of the 2-column matrix `[a, b]`.
fn sigma_ratio(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let (p, q, r) = (a.dot(a), a.dot(b), b.dot(b));
    let mean = 0.5 * (p + r);
    let rad = (0.5 * (p - r)).hypot(q);
    let hi = mean + rad;
    let lo = (p * r - q * q).max(0.0) / hi;
    if hi <= 0.0 {
        return 0.0;
    }
    (lo / hi).sqrt()
}

/// Outcome of comparing the brute-force scan with the formula locus.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleComparison {
    /// Flagged samples farther than one t-cell from every formula point.
    pub spurious: Vec<(usize, usize)>,
    /// Formula points inside the window with no flagged sample within one cell.
    pub missing: Vec<(usize, f64)>,
    pub flagged: usize,
    pub formula_points: usize,
}

impl OracleComparison {
    pub fn agrees(&self) -> bool {
        self.spurious.is_empty() && self.missing.is_empty()
    }
}

/// Symmetric agreement between [`brute_force_singular_scan`] and the node
/// points of `t = sigma / kappa`, within one t-cell.
pub fn compare_with_formula(front: &NullFront, locus: &SingularLocus, scan: &BruteForceScan) -> OracleComparison {
    let dt = front.t_step();
    let slack = dt * (1.0 + 1e-9);
    let (lo, hi) = (front.t_value(0), front.t_value(front.t_count() - 1));
    let mut formula: Vec<Vec<f64>> = vec![Vec::new(); front.x_count()];
    for p in &locus.points {
        if let Some(i) = p.node {
            formula[i].push(p.t);
        }
    }
    let spurious: Vec<(usize, usize)> = scan
        .flagged
        .iter()
        .copied()
        .filter(|&(j, i)| !formula[i].iter().any(|t| (front.t_value(j) - t).abs() <= slack))
        .collect();
    let mut missing = Vec::new();
    let mut count = 0;
    for (i, ts) in formula.iter().enumerate() {
        for &t in ts {
            if t < lo || t > hi {
                continue;
            }
            count += 1;
            let hit = scan.flagged.iter().any(|&(j, k)| k == i && (front.t_value(j) - t).abs() <= slack);
            if !hit {
                missing.push((i, t));
            }
        }
    }
    OracleComparison { spurious, missing, flagged: scan.flagged.len(), formula_points: count }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{Circle, Ellipse, Inflected, Limacon, Parabola, Sphere};
    use crate::frontgen::Sigma;
    use crate::geometry::{CurveDomain, PlaneCurve, SurfaceDomain};
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn front(c: Arc<dyn PlaneCurve>, domain: CurveDomain, n: usize) -> NullFront {
        let g = GeneratingFront::build_curve(c, domain, n).unwrap();
        NullFront::normal_form(Arc::new(g), Sigma::Plus, (-1.0, 5.0), 64).unwrap()
    }

    #[test]
    fn circle_locus_is_focal_point() {
        let f = front(Arc::new(Circle { radius: 1.0 }), CurveDomain::full_turn(), 128);
        let locus = analyze(&f).unwrap();
        assert!(locus.constant_curvature);
        assert_eq!(locus.points.len(), 128);
        for p in &locus.points {
            assert!((p.t - 1.0).abs() < 1e-14);
            assert!(p.image.max_abs_diff(&LorentzVector::new(vec![1.0, 0.0, 0.0]).unwrap()) < 1e-15);
            assert!(p.class.is_non_cuspidal());
        }
    }

    #[test]
    fn ellipse_locus_range_and_classes() {
        let f = front(Arc::new(Ellipse { a: 2.0, b: 1.0 }), CurveDomain::full_turn(), 256);
        let locus = analyze(&f).unwrap();
        let tmin = locus.points.iter().map(|p| p.t).fold(f64::INFINITY, f64::min);
        let tmax = locus.points.iter().map(|p| p.t).fold(0.0, f64::max);
        assert!((tmin - 0.5).abs() < 1e-14 && (tmax - 4.0).abs() < 1e-12);
        let nc: Vec<f64> = locus.non_cuspidal().map(|p| p.param[0]).collect();
        assert_eq!(nc.len(), 4);
        for (p, e) in nc.iter().zip([0.0, PI / 2.0, PI, 1.5 * PI]) {
            assert!((p - e).abs() < 1e-9);
        }
        assert_eq!(locus.count("cuspidal-edge"), 252);
        assert_eq!(locus.cuspidal_arcs(true), 4);
        assert_eq!(locus.count("non-cuspidal-swallowtail"), 4);
    }

    #[test]
    fn minus_front_locus_reflects() {
        let g = GeneratingFront::build_curve(Arc::new(Ellipse { a: 2.0, b: 1.0 }), CurveDomain::full_turn(), 64).unwrap();
        let f = NullFront::normal_form(Arc::new(g), Sigma::Minus, (-5.0, 1.0), 8).unwrap();
        let locus = analyze(&f).unwrap();
        assert!(locus.points.iter().all(|p| p.t < 0.0));
        for p in &locus.points {
            let jet = f.jet_at(p.t, p.node.unwrap());
            assert!(jet.is_singular());
        }
        assert_eq!(locus.non_cuspidal_count(), 4);
    }

    #[test]
    fn sampled_generator_classification() {
        let analytic = GeneratingFront::build_curve(Arc::new(Ellipse { a: 2.0, b: 1.0 }), CurveDomain::full_turn(), 250)
            .unwrap();
        let pos = analytic.nodes().iter().map(|n| [n.position[0], n.position[1]]).collect();
        let g = GeneratingFront::curve_from_samples(pos, None, CurveDomain::full_turn()).unwrap();
        let f = NullFront::normal_form(Arc::new(g), Sigma::Plus, (0.0, 5.0), 8).unwrap();
        let locus = analyze(&f).unwrap();
        assert_eq!(locus.non_cuspidal_count(), 4);
        assert_eq!(locus.count("undetermined"), 0);
    }

    #[test]
    fn limacon_two_non_cuspidal_not_embedded() {
        let f = front(Arc::new(Limacon), CurveDomain::full_turn(), 256);
        let audit = four_vertex_audit(&f).unwrap();
        assert_eq!(audit.non_cuspidal_count, 2);
        assert!(!audit.embedded);
        assert!(audit.complete);
        assert_eq!(audit.outcome, AuditOutcome::NotApplicable);
    }

    #[test]
    fn ellipse_audit_holds() {
        let f = front(Arc::new(Ellipse { a: 2.0, b: 1.0 }), CurveDomain::full_turn(), 256);
        let audit = four_vertex_audit(&f).unwrap();
        assert!(audit.embedded && audit.complete);
        assert_eq!(audit.outcome, AuditOutcome::Holds);
        let c = front(Arc::new(Circle { radius: 1.0 }), CurveDomain::full_turn(), 64);
        assert_eq!(four_vertex_audit(&c).unwrap().outcome, AuditOutcome::Excluded);
    }

    #[test]
    fn completeness_verdicts() {
        let e = front(Arc::new(Ellipse { a: 2.0, b: 1.0 }), CurveDomain::full_turn(), 128);
        assert_eq!(completeness_check(&e).unwrap().verdict, Verdict::Complete);
        let p = front(Arc::new(Parabola), CurveDomain::Open { start: -1.0, end: 1.0 }, 64);
        let r = completeness_check(&p).unwrap();
        assert_eq!(r.verdict, Verdict::Incomplete);
        assert!(!r.compact_domain);
        let i = front(Arc::new(Inflected { amplitude: 0.9 }), CurveDomain::full_turn(), 512);
        let r = completeness_check(&i).unwrap();
        assert_eq!(r.verdict, Verdict::Incomplete);
        assert!(!r.sign_constant[0]);
    }

    #[test]
    fn inflection_gives_unbounded_branch() {
        // Fine enough that some node lands very close to an inflection.
        let f = front(Arc::new(Inflected { amplitude: 0.9 }), CurveDomain::full_turn(), 512);
        let locus = singular_locus(&f).unwrap();
        let tmax = locus.points.iter().map(|p| p.t.abs()).fold(0.0, f64::max);
        assert!(tmax > 50.0, "{tmax}");
        assert!(!locus.unbounded.is_empty());
    }

    #[test]
    fn sphere_locus_per_branch() {
        let g = GeneratingFront::build_surface(Arc::new(Sphere { radius: 2.0 }), SurfaceDomain::LatLong, (8, 12), -1.0)
            .unwrap();
        let f = NullFront::normal_form(Arc::new(g), Sigma::Plus, (0.0, 3.0), 4).unwrap();
        let locus = analyze(&f).unwrap();
        assert_eq!(locus.points.len(), 2 * 96);
        for p in &locus.points {
            assert!((p.t - 2.0).abs() < 1e-12);
            assert_eq!(p.class, PointClass::Unclassified);
            assert!(f.jet_at(p.t, p.node.unwrap()).is_singular());
        }
    }

    #[test]
    fn brute_force_matches_formula_on_ellipse() {
        let g = GeneratingFront::build_curve(Arc::new(Ellipse { a: 2.0, b: 1.0 }), CurveDomain::full_turn(), 128).unwrap();
        let f = NullFront::normal_form(Arc::new(g), Sigma::Plus, (-1.0, 5.0), 128).unwrap();
        let locus = singular_locus(&f).unwrap();
        let scan = brute_force_singular_scan(&f).unwrap();
        let cmp = compare_with_formula(&f, &locus, &scan);
        assert!(cmp.agrees(), "{cmp:?}");
        assert_eq!(cmp.formula_points, 128);
    }

    #[test]
    fn crossing_segments() {
        assert!(segments_cross((0.0, 0.0), (1.0, 1.0), (0.0, 1.0), (1.0, 0.0)));
        assert!(!segments_cross((0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)));
    }
}
