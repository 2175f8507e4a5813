//! Finite-difference stencils on uniform 1-D sample lines.
//!
//! Periodic lines use fourth-order centred stencils everywhere. Open lines use
//! fourth-order centred stencils in the interior, second-order centred one node
//! in from the ends, and second-order one-sided stencils at the ends.

use std::ops::{Add, Mul};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    Open,
}

/// Smallest line length the stencils support.
pub const MIN_LINE: usize = 5;

fn combine<T>(values: &[T], terms: &[(usize, f64)]) -> T
where
    T: Clone + Add<Output = T> + Mul<f64, Output = T>,
{
    let mut it = terms.iter();
    let (i0, c0) = it.next().expect("nonempty stencil");
    let mut acc = values[*i0].clone() * *c0;
    for (i, c) in it {
        acc = acc + values[*i].clone() * *c;
    }
    acc
}

fn wrap(i: isize, n: usize) -> usize {
    i.rem_euclid(n as isize) as usize
}

/// First derivative at every node of a uniformly spaced line.
pub fn first<T>(values: &[T], h: f64, boundary: Boundary) -> Vec<T>
where
    T: Clone + Add<Output = T> + Mul<f64, Output = T>,
{
    let n = values.len();
    assert!(n >= MIN_LINE, "line too short for finite differences: {n}");
    (0..n)
        .map(|i| {
            let ii = i as isize;
            let terms: Vec<(usize, f64)> = match boundary {
                Boundary::Periodic => vec![
                    (wrap(ii - 2, n), 1.0 / (12.0 * h)),
                    (wrap(ii - 1, n), -8.0 / (12.0 * h)),
                    (wrap(ii + 1, n), 8.0 / (12.0 * h)),
                    (wrap(ii + 2, n), -1.0 / (12.0 * h)),
                ],
                Boundary::Open => {
                    if i >= 2 && i + 2 < n {
                        vec![
                            (i - 2, 1.0 / (12.0 * h)),
                            (i - 1, -8.0 / (12.0 * h)),
                            (i + 1, 8.0 / (12.0 * h)),
                            (i + 2, -1.0 / (12.0 * h)),
                        ]
                    } else if i >= 1 && i + 1 < n {
                        vec![(i - 1, -0.5 / h), (i + 1, 0.5 / h)]
                    } else if i == 0 {
                        vec![(0, -1.5 / h), (1, 2.0 / h), (2, -0.5 / h)]
                    } else {
                        vec![(n - 1, 1.5 / h), (n - 2, -2.0 / h), (n - 3, 0.5 / h)]
                    }
                }
            };
            combine(values, &terms)
        })
        .collect()
}

/// Second derivative at every node of a uniformly spaced line.
pub fn second<T>(values: &[T], h: f64, boundary: Boundary) -> Vec<T>
where
    T: Clone + Add<Output = T> + Mul<f64, Output = T>,
{
    let n = values.len();
    assert!(n >= MIN_LINE, "line too short for finite differences: {n}");
    let h2 = h * h;
    (0..n)
        .map(|i| {
            let ii = i as isize;
            let terms: Vec<(usize, f64)> = match boundary {
                Boundary::Periodic => vec![
                    (wrap(ii - 2, n), -1.0 / (12.0 * h2)),
                    (wrap(ii - 1, n), 16.0 / (12.0 * h2)),
                    (i, -30.0 / (12.0 * h2)),
                    (wrap(ii + 1, n), 16.0 / (12.0 * h2)),
                    (wrap(ii + 2, n), -1.0 / (12.0 * h2)),
                ],
                Boundary::Open => {
                    if i >= 2 && i + 2 < n {
                        vec![
                            (i - 2, -1.0 / (12.0 * h2)),
                            (i - 1, 16.0 / (12.0 * h2)),
                            (i, -30.0 / (12.0 * h2)),
                            (i + 1, 16.0 / (12.0 * h2)),
                            (i + 2, -1.0 / (12.0 * h2)),
                        ]
                    } else if i >= 1 && i + 1 < n {
                        vec![(i - 1, 1.0 / h2), (i, -2.0 / h2), (i + 1, 1.0 / h2)]
                    } else if i == 0 {
                        vec![(0, 2.0 / h2), (1, -5.0 / h2), (2, 4.0 / h2), (3, -1.0 / h2)]
                    } else {
                        vec![(n - 1, 2.0 / h2), (n - 2, -5.0 / h2), (n - 3, 4.0 / h2), (n - 4, -1.0 / h2)]
                    }
                }
            };
            combine(values, &terms)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn periodic_sine_is_fourth_order() {
        let err = |n: usize| {
            let h = 2.0 * PI / n as f64;
            let v: Vec<f64> = (0..n).map(|i| (i as f64 * h).sin()).collect();
            let d = first(&v, h, Boundary::Periodic);
            (0..n).map(|i| (d[i] - (i as f64 * h).cos()).abs()).fold(0.0, f64::max)
        };
        let ratio = err(32) / err(64);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }

    #[test]
    fn open_quadratic_is_exact() {
        // Every stencil used on open lines is exact for quadratics.
        let h = 0.1;
        let v: Vec<f64> = (0..9).map(|i| {
            let x = i as f64 * h;
            3.0 * x * x - x + 2.0
        }).collect();
        let d = first(&v, h, Boundary::Open);
        let dd = second(&v, h, Boundary::Open);
        for i in 0..9 {
            let x = i as f64 * h;
            assert!((d[i] - (6.0 * x - 1.0)).abs() < 1e-11);
            assert!((dd[i] - 6.0).abs() < 1e-9);
        }
    }
}
