//! The normal form `F(t, x) = (0, f(x)) + t (1, sigma nu(x))` sampled on a
//! `(t, x)` lattice.
//!
//! The ruling parameter `t` ranges over all of `R`; the window only selects
//! which rulings are sampled. Since `F` is affine in `t`, checks on a few
//! distinct `t` values per node decide the corresponding statement for every
//! `t`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;
use thiserror::Error;

use crate::diff;
use crate::geometry::{GeneratingFront, GeometryError};
use crate::lorentz::{lorentz_dot, LorentzVector};

/// `dF` is singular when `sigma_min <= SINGULAR_REL * sigma_max`.
pub const SINGULAR_REL: f64 = 1e-8;
/// Tolerance on the defining properties of the E-normalised null field.
pub const NORMALIZATION_TOL: f64 = 1e-8;
/// Default separation below which two lift samples count as equal.
pub const LIFT_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrontError {
    #[error("empty t-window [{0}, {1}]")]
    EmptyWindow(f64, f64),
    #[error("t-lattice needs at least 2 values, got {0}")]
    TooFewRulings(usize),
    #[error("null normal at node {node} violates its normalisation by {deviation:e}")]
    Normalization { node: usize, deviation: f64 },
    #[error("generator has no closed-form evaluator")]
    NotAnalytic,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

pub type Result<T> = std::result::Result<T, FrontError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sigma {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sigma {
    pub fn sign(self) -> f64 {
        match self {
            Sigma::Plus => 1.0,
            Sigma::Minus => -1.0,
        }
    }
}

impl FromStr for Sigma {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "+" | "plus" | "+1" | "1" => Ok(Sigma::Plus),
            "-" | "minus" | "-1" => Ok(Sigma::Minus),
            _ => Err(format!("sigma must be + or -, got {s:?}")),
        }
    }
}

impl fmt::Display for Sigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sigma::Plus => "+",
            Sigma::Minus => "-",
        })
    }
}

#[derive(Clone, Debug)]
pub struct NullFront {
    generator: Arc<GeneratingFront>,
    sigma: Sigma,
    window: (f64, f64),
    t_count: usize,
    shift: f64,
}

/// First-order data of `F` at one sample.
#[derive(Clone, Debug)]
pub struct FrontJet {
    pub xi: LorentzVector,
    /// `dF(d/dt)`; equal to `xi` by construction.
    pub f_t: LorentzVector,
    pub f_u: Vec<LorentzVector>,
    pub xi_u: Vec<LorentzVector>,
    /// Rank of the stacked matrix `[dF; d xi]` (the wave-front condition).
    pub rank_mt: usize,
    pub rank_df: usize,
    /// Singular values of `dF`, descending.
    pub df_singular_values: Vec<f64>,
}

impl FrontJet {
    pub fn is_singular(&self) -> bool {
        self.rank_df < self.f_u.len() + 1
    }
}

#[derive(Clone, Debug)]
pub struct InducedMetric {
    /// Gram matrix of `(F_t, F_u1, ...)` under the Lorentzian product.
    pub matrix: DMatrix<f64>,
    /// Ascending eigenvalues.
    pub eigenvalues: Vec<f64>,
}

impl InducedMetric {
    /// `max_j |ds^2(d/dt, d/du_j)|` including `ds^2(d/dt, d/dt)`; zero iff
    /// `d/dt` lies in the kernel.
    pub fn ruling_defect(&self) -> f64 {
        self.matrix.row(0).iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiftCheck {
    pub injective: bool,
    pub min_distance: f64,
    /// Closest non-adjacent pair of nodes.
    pub closest_pair: Option<(usize, usize)>,
}

fn lorentz(time: f64, space: impl Iterator<Item = f64>) -> LorentzVector {
    let mut v = vec![time];
    v.extend(space);
    LorentzVector::from(DVector::from_vec(v))
}

impl NullFront {
    /// Samples `t_count` rulings uniformly on `window` (both ends included).
    pub fn normal_form(generator: Arc<GeneratingFront>, sigma: Sigma, window: (f64, f64), t_count: usize) -> Result<Self> {
        let (a, b) = window;
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(FrontError::EmptyWindow(a, b));
        }
        if t_count < 2 {
            return Err(FrontError::TooFewRulings(t_count));
        }
        Ok(Self { generator, sigma, window, t_count, shift: 0.0 })
    }

    pub fn generator(&self) -> &GeneratingFront {
        &self.generator
    }

    pub fn generator_arc(&self) -> &Arc<GeneratingFront> {
        &self.generator
    }

    pub fn sigma(&self) -> Sigma {
        self.sigma
    }

    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    /// Accumulated ruling offset from [`NullFront::parallel_front`].
    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn t_count(&self) -> usize {
        self.t_count
    }

    pub fn x_count(&self) -> usize {
        self.generator.len()
    }

    /// Ambient dimension `n + 1`.
    pub fn ambient_dim(&self) -> usize {
        self.generator.dim() + 1
    }

    /// Lattice parameter `t_j`; the ruling evaluated there is `t_j + shift`.
    pub fn t_value(&self, j: usize) -> f64 {
        let (a, b) = self.window;
        a + (b - a) * j as f64 / (self.t_count - 1) as f64
    }

    pub fn t_step(&self) -> f64 {
        (self.window.1 - self.window.0) / (self.t_count - 1) as f64
    }

    /// `F` at lattice node `(j, i)`.
    pub fn point(&self, j: usize, i: usize) -> LorentzVector {
        self.point_at(self.t_value(j), i)
    }

    /// `F(t, x_i)` for an arbitrary lattice-relative `t`.
    pub fn point_at(&self, t: f64, i: usize) -> LorentzVector {
        let t = t + self.shift;
        match self.sigma {
            Sigma::Plus => self.plus_point(t, i),
            // Time reflection of the + front at -t.
            Sigma::Minus => reflect_time(&self.plus_point(-t, i)),
        }
    }

    fn plus_point(&self, t: f64, i: usize) -> LorentzVector {
        let node = self.generator.node(i);
        lorentz(t, node.position.iter().zip(node.normal.iter()).map(|(f, n)| f + t * n))
    }

    /// Direct evaluation of `(0, f) + t (1, sigma nu)` without the reflection.
    pub fn point_direct(&self, t: f64, i: usize) -> LorentzVector {
        let t = t + self.shift;
        let s = self.sigma.sign();
        let node = self.generator.node(i);
        lorentz(t, node.position.iter().zip(node.normal.iter()).map(|(f, n)| f + t * (s * n)))
    }

    /// `F(t, x)` at an arbitrary generator parameter (closed-form generators).
    pub fn evaluate(&self, t: f64, param: &[f64]) -> Result<LorentzVector> {
        let (f, nu) = self.generator.evaluate(param).ok_or(FrontError::NotAnalytic)?;
        let t = t + self.shift;
        let s = self.sigma.sign();
        Ok(lorentz(t, f.iter().zip(nu.iter()).map(|(f, n)| f + t * (s * n))))
    }

    /// `xi(x_i) = (1, sigma nu(x_i))`.
    pub fn xi(&self, i: usize) -> LorentzVector {
        let s = self.sigma.sign();
        lorentz(1.0, self.generator.node(i).normal.iter().map(|n| s * n))
    }

    /// The E-normalised null field at every node, after checking
    /// `<xi, xi> = 0`, `|xi|_E = sqrt 2` and `xi_0 > 0`.
    pub fn e_normalized_field(&self) -> Result<Vec<LorentzVector>> {
        (0..self.x_count())
            .map(|i| {
                let xi = self.xi(i);
                let c = xi.coords();
                let null = lorentz_dot(c, c).abs();
                let norm = (c.iter().map(|x| x * x).sum::<f64>() - 2.0).abs();
                let deviation = null.max(norm);
                if !(deviation <= NORMALIZATION_TOL) || !(xi.time() > 0.0) {
                    return Err(FrontError::Normalization { node: i, deviation });
                }
                Ok(xi)
            })
            .collect()
    }

    /// Height `tau(F(t_j, x)) = t_j + shift`.
    pub fn tau_hat(&self, j: usize, i: usize) -> f64 {
        self.point(j, i).height()
    }

    /// Jacobian data at lattice node `(j, i)` from the generator's node
    /// derivatives.
    pub fn jet(&self, j: usize, i: usize) -> FrontJet {
        self.jet_at(self.t_value(j), i)
    }

    pub fn jet_at(&self, t: f64, i: usize) -> FrontJet {
        let t = t + self.shift;
        let s = self.sigma.sign();
        let node = self.generator.node(i);
        let xi = self.xi(i);
        let f_u: Vec<LorentzVector> = node
            .tangents
            .iter()
            .zip(&node.normal_derivs)
            .map(|(fu, nu)| lorentz(0.0, fu.iter().zip(nu.iter()).map(|(a, b)| a + t * (s * b))))
            .collect();
        let xi_u: Vec<LorentzVector> = node.normal_derivs.iter().map(|nu| lorentz(0.0, nu.iter().map(|b| s * b))).collect();
        finish_jet(xi, f_u, xi_u)
    }

    /// Jacobian from centred differences of lattice points along the grid
    /// axes, for comparison with [`NullFront::jet`].
    pub fn fd_jet(&self, j: usize, i: usize) -> FrontJet {
        let t = self.t_value(j);
        let axes = self.generator.axes();
        let mut f_u = Vec::with_capacity(axes.len());
        let mut xi_u = Vec::with_capacity(axes.len());
        let line_len = |k: usize| axes[k].len;
        for (k, axis) in axes.iter().enumerate() {
            let (idx, pos): (Vec<usize>, usize) = if axes.len() == 1 {
                ((0..axis.len).collect(), i)
            } else {
                let nv = line_len(1);
                if k == 0 {
                    ((0..axis.len).map(|a| a * nv + i % nv).collect(), i / nv)
                } else {
                    ((0..axis.len).map(|b| (i / nv) * nv + b).collect(), i % nv)
                }
            };
            let pts: Vec<DVector<f64>> = idx.iter().map(|&n| self.point_at(t, n).as_dvector().clone()).collect();
            let xis: Vec<DVector<f64>> = idx.iter().map(|&n| self.xi(n).as_dvector().clone()).collect();
            f_u.push(LorentzVector::from(diff::first(&pts, axis.step, axis.boundary())[pos].clone()));
            xi_u.push(LorentzVector::from(diff::first(&xis, axis.step, axis.boundary())[pos].clone()));
        }
        finish_jet(self.xi(i), f_u, xi_u)
    }

    /// Gram matrix of `dF` under `<,>` at `(j, i)`.
    pub fn induced_metric(&self, j: usize, i: usize) -> InducedMetric {
        induced_metric_of(&self.jet(j, i))
    }

    /// `F^delta = F + delta xi`, realised as a shift of the ruling lattice so
    /// that `F^delta(t, x) = F(t + delta, x)` holds bit for bit.
    pub fn parallel_front(&self, delta: f64) -> Self {
        let mut out = self.clone();
        out.shift = self.shift + delta;
        out
    }

    /// Injectivity of `l_f = (f, nu)` on the node grid, ignoring grid
    /// neighbours.
    pub fn lift_embedding_check(&self, tol: f64) -> LiftCheck {
        let g = &self.generator;
        let samples: Vec<DVector<f64>> = g
            .nodes()
            .iter()
            .map(|n| DVector::from_iterator(2 * g.dim(), n.position.iter().chain(n.normal.iter()).copied()))
            .collect();
        lift_injective(&samples, tol, |a, b| g.grid_adjacent(a, b))
    }

    /// Points of the `t_j` slice, in node order.
    pub fn slice(&self, j: usize) -> Vec<LorentzVector> {
        (0..self.x_count()).map(|i| self.point(j, i)).collect()
    }
}

pub(crate) fn reflect_time(v: &LorentzVector) -> LorentzVector {
    let mut c = v.as_dvector().clone();
    c[0] = -c[0];
    LorentzVector::from(c)
}

fn finish_jet(xi: LorentzVector, f_u: Vec<LorentzVector>, xi_u: Vec<LorentzVector>) -> FrontJet {
    let m = xi.dim();
    let cols = f_u.len() + 1;
    let mut df = DMatrix::zeros(m, cols);
    let mut mt = DMatrix::zeros(2 * m, cols);
    df.column_mut(0).copy_from(xi.as_dvector());
    mt.view_mut((0, 0), (m, 1)).copy_from(xi.as_dvector());
    for (k, (fu, xu)) in f_u.iter().zip(&xi_u).enumerate() {
        df.column_mut(k + 1).copy_from(fu.as_dvector());
        mt.view_mut((0, k + 1), (m, 1)).copy_from(fu.as_dvector());
        mt.view_mut((m, k + 1), (m, 1)).copy_from(xu.as_dvector());
    }
    let sv_df: Vec<f64> = {
        let mut s: Vec<f64> = df.singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    };
    let rank_of = |sv: &[f64]| {
        let max = sv.iter().cloned().fold(0.0, f64::max);
        sv.iter().filter(|&&s| max > 0.0 && s > SINGULAR_REL * max).count()
    };
    let sv_mt: Vec<f64> = mt.singular_values().iter().copied().collect();
    FrontJet {
        f_t: xi.clone(),
        xi,
        f_u,
        xi_u,
        rank_mt: rank_of(&sv_mt),
        rank_df: rank_of(&sv_df),
        df_singular_values: sv_df,
    }
}

pub fn induced_metric_of(jet: &FrontJet) -> InducedMetric {
    let cols: Vec<&LorentzVector> = std::iter::once(&jet.f_t).chain(jet.f_u.iter()).collect();
    let k = cols.len();
    let matrix = DMatrix::from_fn(k, k, |a, b| lorentz_dot(cols[a].coords(), cols[b].coords()));
    let mut eigenvalues: Vec<f64> = SymmetricEigen::new(matrix.clone()).eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|a, b| a.total_cmp(b));
    InducedMetric { matrix, eigenvalues }
}

/// Pairwise injectivity scan of lift samples; `adjacent(a, b)` marks pairs to
/// skip.
pub fn lift_injective(samples: &[DVector<f64>], tol: f64, adjacent: impl Fn(usize, usize) -> bool) -> LiftCheck {
    let mut best = f64::INFINITY;
    let mut pair = None;
    for a in 0..samples.len() {
        for b in a + 1..samples.len() {
            if adjacent(a, b) {
                continue;
            }
            let d = (&samples[a] - &samples[b]).norm();
            if d < best {
                best = d;
                pair = Some((a, b));
            }
        }
    }
    LiftCheck { injective: best > tol, min_distance: best, closest_pair: pair }
}

/// Result of one invariant over a set of samples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantResult {
    pub name: String,
    pub max_violation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl InvariantResult {
    fn new(name: &str, max_violation: f64, tolerance: f64) -> Self {
        Self { name: name.to_string(), max_violation, tolerance, passed: max_violation <= tolerance }
    }
}

/// The null-front invariants at every node and each of `ts`:
/// null and E-normalised `xi`, `xi` orthogonal to `dF`, `rank M_t = n`, and a
/// positive semi-definite induced metric with `d/dt` in its kernel.
pub fn invariant_suite(front: &NullFront, ts: &[f64]) -> Vec<InvariantResult> {
    let n = front.generator().dim();
    let mut null: f64 = 0.0;
    let mut enorm: f64 = 0.0;
    let mut ortho: f64 = 0.0;
    let mut rank: f64 = 0.0;
    let mut min_eig: f64 = 0.0;
    let mut kernel: f64 = 0.0;
    for i in 0..front.x_count() {
        let xi = front.xi(i);
        let c = xi.coords();
        null = null.max(lorentz_dot(c, c).abs());
        enorm = enorm.max((c.iter().map(|x| x * x).sum::<f64>() - 2.0).abs());
        for &t in ts {
            let jet = front.jet_at(t, i);
            for fu in &jet.f_u {
                ortho = ortho.max(lorentz_dot(c, fu.coords()).abs());
            }
            rank = rank.max((jet.rank_mt as f64 - n as f64).abs());
            let metric = induced_metric_of(&jet);
            min_eig = min_eig.max(metric.eigenvalues[0].abs());
            min_eig = min_eig.max((-metric.eigenvalues[0]).max(0.0));
            kernel = kernel.max(metric.ruling_defect());
        }
    }
    vec![
        InvariantResult::new("xi_null", null, 1e-10),
        InvariantResult::new("xi_euclidean_norm", enorm, 1e-10),
        InvariantResult::new("xi_orthogonal_to_dF", ortho, 1e-8),
        InvariantResult::new("rank_Mt_minus_n", rank, 0.0),
        InvariantResult::new("metric_smallest_eigenvalue", min_eig, 1e-9),
        InvariantResult::new("metric_ruling_in_kernel", kernel, 1e-9),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{Circle, Ellipse, Sphere, WoundCircle};
    use crate::geometry::{CurveDomain, SurfaceDomain};

    fn curve_front(c: Arc<dyn crate::geometry::PlaneCurve>, n: usize, flip: bool) -> Arc<GeneratingFront> {
        let g = GeneratingFront::build_curve(c, CurveDomain::full_turn(), n).unwrap();
        Arc::new(if flip { g.flipped() } else { g })
    }

    #[test]
    fn zero_slice_is_generator() {
        let g = curve_front(Arc::new(Circle { radius: 1.0 }), 64, false);
        let f = NullFront::normal_form(g.clone(), Sigma::Plus, (0.0, 2.0), 5).unwrap();
        for i in 0..64 {
            let p = f.point(0, i);
            assert_eq!(p.time(), 0.0);
            assert_eq!(p.space(), g.node(i).position.as_slice());
        }
    }

    #[test]
    fn height_equals_ruling_parameter() {
        let g = curve_front(Arc::new(Ellipse { a: 2.0, b: 1.0 }), 64, false);
        let f = NullFront::normal_form(g, Sigma::Plus, (-3.0, 3.0), 7).unwrap();
        for j in 0..7 {
            for i in 0..64 {
                assert_eq!(f.tau_hat(j, i), f.t_value(j));
            }
        }
    }

    #[test]
    fn outward_circle_slices_are_parallel_circles() {
        let g = curve_front(Arc::new(Circle { radius: 1.0 }), 64, true);
        let f = NullFront::normal_form(g, Sigma::Plus, (0.0, 2.0), 5).unwrap();
        for j in 0..5 {
            let c = f.t_value(j);
            for p in f.slice(j) {
                assert_eq!(p.time(), c);
                let r = (p.space()[0].powi(2) + p.space()[1].powi(2)).sqrt();
                assert!((r - (1.0 + c)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn minus_front_by_reflection_matches_direct() {
        let g = curve_front(Arc::new(Ellipse { a: 2.0, b: 1.0 }), 64, false);
        let f = NullFront::normal_form(g, Sigma::Minus, (-2.0, 2.0), 9).unwrap();
        for j in 0..9 {
            for i in 0..64 {
                assert_eq!(f.point(j, i), f.point_direct(f.t_value(j), i));
            }
        }
    }

    #[test]
    fn empty_window_rejected() {
        let g = curve_front(Arc::new(Circle { radius: 1.0 }), 16, false);
        assert_eq!(
            NullFront::normal_form(g.clone(), Sigma::Plus, (1.0, 1.0), 4).unwrap_err(),
            FrontError::EmptyWindow(1.0, 1.0)
        );
        assert!(NullFront::normal_form(g, Sigma::Plus, (0.0, f64::NAN), 4).is_err());
    }

    #[test]
    fn e_normalized_field_properties() {
        let g = curve_front(Arc::new(Circle { radius: 1.0 }), 32, false);
        let f = NullFront::normal_form(g.clone(), Sigma::Plus, (0.0, 1.0), 2).unwrap();
        for (i, xi) in f.e_normalized_field().unwrap().iter().enumerate() {
            assert_eq!(xi.time(), 1.0);
            assert_eq!(xi.space(), g.node(i).normal.as_slice());
        }
    }

    #[test]
    fn circle_ranks() {
        let g = curve_front(Arc::new(Circle { radius: 1.0 }), 64, false);
        let f = NullFront::normal_form(g, Sigma::Plus, (0.0, 2.0), 3).unwrap();
        for i in 0..64 {
            let regular = f.jet(0, i);
            assert_eq!((regular.rank_mt, regular.rank_df), (2, 2));
            let focal = f.jet(1, i);
            assert_eq!(focal.rank_mt, 2);
            assert_eq!(focal.rank_df, 1);
        }
    }

    #[test]
    fn sphere_front_regular_rank() {
        let g = GeneratingFront::build_surface(Arc::new(Sphere { radius: 1.0 }), SurfaceDomain::LatLong, (16, 24), -1.0)
            .unwrap();
        let f = NullFront::normal_form(Arc::new(g), Sigma::Plus, (0.0, 0.5), 2).unwrap();
        for i in 0..f.x_count() {
            let jet = f.jet(0, i);
            assert_eq!(jet.rank_df, 3);
            assert_eq!(jet.rank_mt, 3);
        }
    }

    #[test]
    fn metric_kills_ruling() {
        let g = curve_front(Arc::new(Ellipse { a: 2.0, b: 1.0 }), 64, false);
        let f = NullFront::normal_form(g, Sigma::Plus, (-1.0, 3.0), 5).unwrap();
        for j in 0..5 {
            for i in 0..64 {
                let m = f.induced_metric(j, i);
                assert!(m.ruling_defect() < 1e-12);
                assert!(m.eigenvalues[0] >= -1e-12);
            }
        }
    }

    #[test]
    fn parallel_front_composes_exactly() {
        let g = curve_front(Arc::new(Ellipse { a: 2.0, b: 1.0 }), 32, false);
        let f = NullFront::normal_form(g, Sigma::Plus, (-1.0, 1.0), 5).unwrap();
        let (d1, d2) = (0.1, 0.2);
        let a = f.parallel_front(d1).parallel_front(d2);
        let b = f.parallel_front(d1 + d2);
        let same = f.parallel_front(0.0);
        for j in 0..5 {
            for i in 0..32 {
                assert_eq!(a.point(j, i), b.point(j, i));
                assert_eq!(same.point(j, i), f.point(j, i));
                assert_eq!(f.parallel_front(d1).point(j, i), f.point_at(f.t_value(j) + d1, i));
            }
        }
    }

    #[test]
    fn inward_circle_shifted_onto_focal_line() {
        let g = curve_front(Arc::new(Circle { radius: 1.0 }), 64, false);
        let f = NullFront::normal_form(g, Sigma::Plus, (0.0, 1.0), 2).unwrap().parallel_front(1.0);
        assert!((0..64).all(|i| f.jet(0, i).is_singular()));
    }

    #[test]
    fn lift_checks() {
        let e = curve_front(Arc::new(Ellipse { a: 2.0, b: 1.0 }), 128, false);
        let f = NullFront::normal_form(e, Sigma::Plus, (0.0, 1.0), 2).unwrap();
        assert!(f.lift_embedding_check(LIFT_TOL).injective);
        let d = curve_front(Arc::new(WoundCircle { turns: 2.0 }), 128, false);
        let f = NullFront::normal_form(d, Sigma::Plus, (0.0, 1.0), 2).unwrap();
        let check = f.lift_embedding_check(LIFT_TOL);
        assert!(!check.injective);
        assert!(check.min_distance < 1e-12);
    }

    #[test]
    fn finite_difference_jacobian_converges_to_analytic() {
        let err = |n: usize| {
            let g = curve_front(Arc::new(Ellipse { a: 2.0, b: 1.0 }), n, false);
            let f = NullFront::normal_form(g, Sigma::Plus, (0.0, 2.0), 3).unwrap();
            let mut worst: f64 = 0.0;
            for j in 0..3 {
                for i in 0..n {
                    let (a, b) = (f.jet(j, i), f.fd_jet(j, i));
                    worst = worst.max(a.f_u[0].max_abs_diff(&b.f_u[0]));
                    worst = worst.max(a.xi_u[0].max_abs_diff(&b.xi_u[0]));
                }
            }
            worst
        };
        let (coarse, fine) = (err(256), err(512));
        assert!(coarse < 1e-4, "{coarse}");
        // At least second order.
        assert!(coarse / fine > 4.0, "{coarse} / {fine}");
    }

}
