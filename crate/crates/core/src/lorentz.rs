//! Linear algebra on Lorentz-Minkowski space `R^{n+1}_1`.
//!
//! Coordinate 0 is the time coordinate; the Lorentzian product has signature
//! `(-, +, ..., +)`. The Euclidean product on the same coordinates is provided
//! alongside because normalisations (`|xi|_E = sqrt 2`) and rank tests are
//! Euclidean.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Relative cutoff for singular values in rank and degeneracy tests.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LorentzError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("ambient dimension {0} is too small (need n + 1 >= 3)")]
    DimensionTooSmall(usize),
    #[error("the zero vector has no time orientation")]
    ZeroVector,
    #[error("basis is linearly dependent (rank {rank} < {dim})")]
    DependentBasis { rank: usize, dim: usize },
    #[error("non-finite coordinate")]
    NonFinite,
}

pub type Result<T> = std::result::Result<T, LorentzError>;

/// A point or vector of `R^{n+1}_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct LorentzVector(DVector<f64>);

impl LorentzVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 3 {
            return Err(LorentzError::DimensionTooSmall(coords.len()));
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(LorentzError::NonFinite);
        }
        Ok(Self(DVector::from_vec(coords)))
    }

    /// `(time, space)`; the space part lives in the slice `tau = 0`.
    pub fn from_parts(time: f64, space: &[f64]) -> Result<Self> {
        let mut coords = Vec::with_capacity(space.len() + 1);
        coords.push(time);
        coords.extend_from_slice(space);
        Self::new(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DVector::zeros(dim))
    }

    /// Standard basis vector `e_i` of an `dim`-dimensional space.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[i] = 1.0;
        Self(v)
    }

    /// The unit time vector `e_0`.
    pub fn e0(dim: usize) -> Self {
        Self::basis(dim, 0)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn time(&self) -> f64 {
        self.0[0]
    }

    pub fn space(&self) -> &[f64] {
        &self.0.as_slice()[1..]
    }

    pub fn as_dvector(&self) -> &DVector<f64> {
        &self.0
    }

    /// Height function `tau(v) = -<v, e_0>`, i.e. the time coordinate.
    pub fn height(&self) -> f64 {
        self.0[0]
    }

    /// Orthogonal projection onto the space-like slice `tau = 0`.
    pub fn project_to_slice(&self) -> Self {
        let mut v = self.0.clone();
        v[0] = 0.0;
        Self(v)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

impl From<DVector<f64>> for LorentzVector {
    fn from(v: DVector<f64>) -> Self {
        Self(v)
    }
}

impl Add for &LorentzVector {
    type Output = LorentzVector;
    fn add(self, rhs: &LorentzVector) -> LorentzVector {
        LorentzVector(&self.0 + &rhs.0)
    }
}

impl Add for LorentzVector {
    type Output = LorentzVector;
    fn add(self, rhs: LorentzVector) -> LorentzVector {
        LorentzVector(self.0 + rhs.0)
    }
}

impl Sub for &LorentzVector {
    type Output = LorentzVector;
    fn sub(self, rhs: &LorentzVector) -> LorentzVector {
        LorentzVector(&self.0 - &rhs.0)
    }
}

impl Sub for LorentzVector {
    type Output = LorentzVector;
    fn sub(self, rhs: LorentzVector) -> LorentzVector {
        LorentzVector(self.0 - rhs.0)
    }
}

impl Mul<f64> for &LorentzVector {
    type Output = LorentzVector;
    fn mul(self, s: f64) -> LorentzVector {
        LorentzVector(&self.0 * s)
    }
}

impl Mul<f64> for LorentzVector {
    type Output = LorentzVector;
    fn mul(self, s: f64) -> LorentzVector {
        LorentzVector(self.0 * s)
    }
}

impl Neg for LorentzVector {
    type Output = LorentzVector;
    fn neg(self) -> LorentzVector {
        LorentzVector(-self.0)
    }
}

fn check_dims(u: &LorentzVector, v: &LorentzVector) -> Result<()> {
    if u.dim() != v.dim() {
        return Err(LorentzError::DimensionMismatch(u.dim(), v.dim()));
    }
    Ok(())
}

/// `<u, v> = -u_0 v_0 + sum_{i >= 1} u_i v_i`.
pub fn minkowski_inner(u: &LorentzVector, v: &LorentzVector) -> Result<f64> {
    check_dims(u, v)?;
    Ok(lorentz_dot(u.coords(), v.coords()))
}

/// Lorentzian product on raw coordinate slices of equal length.
pub(crate) fn lorentz_dot(u: &[f64], v: &[f64]) -> f64 {
    let space: f64 = u[1..].iter().zip(&v[1..]).map(|(a, b)| a * b).sum();
    space - u[0] * v[0]
}

pub fn euclidean_inner(u: &LorentzVector, v: &LorentzVector) -> Result<f64> {
    check_dims(u, v)?;
    Ok(u.0.dot(&v.0))
}

pub fn euclidean_norm(u: &LorentzVector) -> f64 {
    u.0.norm()
}

/// `|<v, v>| <= tol * (v, v)_E`.
pub fn is_null(v: &LorentzVector, tol: f64) -> bool {
    let q = lorentz_dot(v.coords(), v.coords());
    q.abs() <= tol * v.0.norm_squared()
}

/// Future-pointing means a strictly positive time coordinate.
pub fn is_future_pointing(v: &LorentzVector) -> Result<bool> {
    if v.0.iter().all(|&x| x == 0.0) {
        return Err(LorentzError::ZeroVector);
    }
    Ok(v.time() > 0.0)
}

/// Numerical rank of a set of vectors: singular values above `tol * sigma_max`.
pub fn rank(vectors: &[LorentzVector], tol: f64) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let m = DMatrix::from_columns(&vectors.iter().map(|v| v.0.clone()).collect::<Vec<_>>());
    matrix_rank(&m, tol)
}

pub(crate) fn matrix_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * max).count()
}

/// A linear subspace given by a linearly independent basis.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<LorentzVector>,
}

impl Subspace {
    pub fn new(ambient: usize, basis: Vec<LorentzVector>) -> Result<Self> {
        if ambient < 3 {
            return Err(LorentzError::DimensionTooSmall(ambient));
        }
        for b in &basis {
            if b.dim() != ambient {
                return Err(LorentzError::DimensionMismatch(ambient, b.dim()));
            }
        }
        let r = rank(&basis, DEFAULT_TOL);
        if r < basis.len() {
            return Err(LorentzError::DependentBasis { rank: r, dim: basis.len() });
        }
        Ok(Self { ambient, basis })
    }

    /// Span of nonempty `vectors` with an independent basis.
    pub fn span(vectors: Vec<LorentzVector>) -> Result<Self> {
        let ambient = vectors.first().map(LorentzVector::dim).unwrap_or(0);
        Self::new(ambient, vectors)
    }

    pub fn zero(ambient: usize) -> Self {
        Self { ambient, basis: Vec::new() }
    }

    pub fn whole(ambient: usize) -> Self {
        Self { ambient, basis: (0..ambient).map(|i| LorentzVector::basis(ambient, i)).collect() }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[LorentzVector] {
        &self.basis
    }

    pub fn contains(&self, v: &LorentzVector, tol: f64) -> bool {
        let mut all = self.basis.clone();
        all.push(v.clone());
        rank(&all, tol) == self.dim()
    }

    /// Span equality by the double rank test: `rank A = rank B = rank (A u B)`.
    pub fn same_span(&self, other: &Subspace, tol: f64) -> bool {
        if self.ambient != other.ambient || self.dim() != other.dim() {
            return false;
        }
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        rank(&all, tol) == self.dim()
    }

    /// Gram matrix of the basis under the Lorentzian product.
    pub fn gram(&self) -> DMatrix<f64> {
        let k = self.dim();
        DMatrix::from_fn(k, k, |i, j| lorentz_dot(self.basis[i].coords(), self.basis[j].coords()))
    }
}

/// `true` iff `rank(A u B) = dim A + dim B`.
pub fn meets_trivially(a: &Subspace, b: &Subspace, tol: f64) -> bool {
    let mut all = a.basis.clone();
    all.extend(b.basis.iter().cloned());
    rank(&all, tol) == a.dim() + b.dim()
}

/// Every basis pair satisfies `|<a_i, b_j>| <= tol * |a_i|_E |b_j|_E`.
pub fn perpendicular(a: &Subspace, b: &Subspace, tol: f64) -> bool {
    a.basis.iter().all(|x| {
        b.basis.iter().all(|y| {
            let ip = lorentz_dot(x.coords(), y.coords());
            ip.abs() <= tol * x.0.norm() * y.0.norm()
        })
    })
}

/// `V^perp = { x : <x, v> = 0 for all v in V }`, with a Euclidean-orthonormal basis.
pub fn orthogonal_complement(v: &Subspace) -> Subspace {
    let n1 = v.ambient;
    if v.dim() == 0 {
        return Subspace::whole(n1);
    }
    // Rows are eta * b_i, padded to a square matrix so the SVD returns a full
    // right-singular basis.
    let mut a = DMatrix::zeros(n1, n1);
    for (i, b) in v.basis.iter().enumerate() {
        for j in 0..n1 {
            a[(i, j)] = if j == 0 { -b.0[j] } else { b.0[j] };
        }
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..n1).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let basis = order
        .into_iter()
        .take(n1 - v.dim())
        .map(|i| LorentzVector(v_t.row(i).transpose()))
        .collect();
    Subspace { ambient: n1, basis }
}

/// A nonzero `v in V` with `<v, w> = 0` for all `w in V`, if `V` is degenerate.
///
/// The Gram matrix counts as singular when its smallest singular value is at
/// most `tol` times the largest (or the Gram matrix vanishes). The returned
/// vector is Euclidean-normalised with a fixed sign convention.
pub fn degenerate_vector(v: &Subspace, tol: f64) -> Option<LorentzVector> {
    if v.dim() == 0 {
        return None;
    }
    let gram = v.gram();
    let svd = gram.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sv = &svd.singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let (imin, min) = sv
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, s)| (i, *s))
        .expect("nonempty");
    if max > 0.0 && min > tol * max {
        return None;
    }
    let coeffs = v_t.row(imin);
    let mut out = DVector::zeros(v.ambient);
    for (c, b) in coeffs.iter().zip(&v.basis) {
        out += &b.0 * *c;
    }
    let norm = out.norm();
    out /= norm;
    let pivot = out.iter().find(|x| x.abs() > 1e-12).cloned().unwrap_or(1.0);
    if pivot < 0.0 {
        out = -out;
    }
    Some(LorentzVector(out))
}

/// Outcome of checking the three-subspace lemma on concrete data.
#[derive(Clone, Debug, PartialEq)]
pub struct LemmaReport {
    pub n_is_line: bool,
    pub n_is_lightlike: bool,
    pub n_meets_w_trivially: bool,
    pub v_perp_n: bool,
    pub w_perp_n: bool,
    pub w_perp_v: bool,
    /// `Some(V n W = {0})` when every hypothesis holds.
    pub conclusion: Option<bool>,
}

impl LemmaReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.n_is_line
            && self.n_is_lightlike
            && self.n_meets_w_trivially
            && self.v_perp_n
            && self.w_perp_n
            && self.w_perp_v
    }
}

/// Checks: (1) `N` is a light-like line with `N n W = {0}`; (2) `V, W` are
/// perpendicular to `N`; (3) `W` is perpendicular to `V`. When all hold the
/// conclusion `V n W = {0}` is tested by rank.
pub fn check_subspace_lemma(v: &Subspace, w: &Subspace, n: &Subspace, tol: f64) -> LemmaReport {
    let n_is_line = n.dim() == 1;
    let n_is_lightlike = n_is_line && is_null(&n.basis[0], tol);
    let mut report = LemmaReport {
        n_is_line,
        n_is_lightlike,
        n_meets_w_trivially: meets_trivially(n, w, tol),
        v_perp_n: perpendicular(v, n, tol),
        w_perp_n: perpendicular(w, n, tol),
        w_perp_v: perpendicular(w, v, tol),
        conclusion: None,
    };
    if report.hypotheses_hold() {
        report.conclusion = Some(meets_trivially(v, w, tol));
    }
    report
}
