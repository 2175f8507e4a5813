//! Shared builders and independent oracles for the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use nullfront::builtins::{self, Generator};
use nullfront::frontgen::{NullFront, Sigma};
use nullfront::geometry::GeneratingFront;
use nullfront::lorentz::{LorentzVector, Subspace};
use rand::Rng;

/// `-u_0 v_0 + sum u_i v_i`, written out independently of the library.
pub fn mink(u: &[f64], v: &[f64]) -> f64 {
    -u[0] * v[0] + u[1..].iter().zip(&v[1..]).map(|(a, b)| a * b).sum::<f64>()
}

pub fn front(name: &str, grid: usize, sigma: Sigma, window: (f64, f64), t_count: usize) -> NullFront {
    let g = match builtins::lookup(name, &Default::default()).expect("built-in") {
        Generator::Curve { curve, domain, flip } => {
            let g = GeneratingFront::build_curve(curve, domain, grid).unwrap();
            if flip {
                g.flipped()
            } else {
                g
            }
        }
        Generator::Surface { map, domain, orientation } => {
            GeneratingFront::build_surface(map, domain, (grid, grid), orientation).unwrap()
        }
        Generator::LightCone => panic!("light cone has no generator"),
    };
    NullFront::normal_form(Arc::new(g), sigma, window, t_count).unwrap()
}

pub fn lv(c: Vec<f64>) -> LorentzVector {
    LorentzVector::new(c).unwrap()
}

pub fn random_vec<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Random future-pointing null vector `(1, u)`, `|u| = 1`.
pub fn random_null<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let u = random_vec(rng, dim - 1);
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.1 {
            let mut v = vec![1.0];
            v.extend(u.iter().map(|x| x / norm));
            return v;
        }
    }
}

/// Basis of `{x : <x, c> = 0 for all c in constraints}` from the eigenvectors
/// of `A^T A`, with `A` the rows `eta c`.
pub fn lorentz_orthogonal(dim: usize, constraints: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut a = DMatrix::<f64>::zeros(constraints.len().max(1), dim);
    for (r, c) in constraints.iter().enumerate() {
        for k in 0..dim {
            a[(r, k)] = if k == 0 { -c[k] } else { c[k] };
        }
    }
    let eig = SymmetricEigen::new(a.transpose() * &a);
    let scale = eig.eigenvalues.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
    (0..dim)
        .filter(|&k| eig.eigenvalues[k].abs() <= 1e-12 * scale)
        .map(|k| eig.eigenvectors.column(k).iter().copied().collect())
        .collect()
}

fn combine<R: Rng>(rng: &mut R, basis: &[Vec<f64>], count: usize) -> Vec<Vec<f64>> {
    let dim = basis[0].len();
    (0..count)
        .map(|_| {
            let w = random_vec(rng, basis.len());
            let mut v = DVector::<f64>::zeros(dim);
            for (c, b) in w.iter().zip(basis) {
                v += DVector::from_row_slice(b) * *c;
            }
            v.iter().copied().collect()
        })
        .collect()
}

/// A triple satisfying the subspace-lemma hypotheses by construction: null
/// line `N`, `W` inside `N^perp` missing `N`, `V` inside `N^perp n W^perp`.
pub struct Triple {
    pub v: Subspace,
    pub w: Subspace,
    pub n: Subspace,
}

pub fn random_triple<R: Rng>(rng: &mut R, dim: usize) -> Triple {
    let null = random_null(rng, dim);
    // Space-like part of N^perp: (0, s) with s orthogonal to the spatial part of N.
    let spatial: Vec<Vec<f64>> = lorentz_orthogonal(dim, &[null.clone(), {
        let mut e0 = vec![0.0; dim];
        e0[0] = 1.0;
        e0
    }]);
    let k = rng.random_range(1..=spatial.len());
    let w_basis: Vec<Vec<f64>> = combine(rng, &spatial, k)
        .into_iter()
        .map(|s| {
            let a = rng.random_range(-1.0..1.0);
            s.iter().zip(&null).map(|(x, n)| x + a * n).collect()
        })
        .collect();
    let mut constraints = vec![null.clone()];
    constraints.extend(w_basis.iter().cloned());
    let v_space = lorentz_orthogonal(dim, &constraints);
    let j = rng.random_range(1..=v_space.len());
    let v_basis = combine(rng, &v_space, j);
    Triple {
        v: Subspace::new(dim, v_basis.into_iter().map(lv).collect()).unwrap(),
        w: Subspace::new(dim, w_basis.into_iter().map(lv).collect()).unwrap(),
        n: Subspace::new(dim, vec![lv(null)]).unwrap(),
    }
}

/// Random subspace of dimension `1..dim`.
pub fn random_subspace<R: Rng>(rng: &mut R, dim: usize) -> Subspace {
    let k = rng.random_range(1..dim);
    Subspace::new(dim, (0..k).map(|_| lv(random_vec(rng, dim))).collect()).unwrap()
}
