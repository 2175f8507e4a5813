//! Truncated Taylor series in one variable.
//!
//! A [`Jet`] carries the normalised Taylor coefficients `c_k = f^(k)(t0) / k!`
//! of a function around a point. Arithmetic propagates them exactly (up to
//! rounding), which gives oracle-grade derivatives of closed-form curves
//! without symbolic differentiation.
//!
//! Differentiating a jet drops its highest coefficient; `valid` tracks how many
//! leading coefficients are still meaningful.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Number of stored Taylor coefficients (value plus six derivatives).
pub const JET_LEN: usize = 7;

const FACTORIAL: [f64; JET_LEN] = [1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    c: [f64; JET_LEN],
    valid: usize,
}

impl Jet {
    pub fn constant(value: f64) -> Self {
        let mut c = [0.0; JET_LEN];
        c[0] = value;
        Self { c, valid: JET_LEN }
    }

    /// The independent variable evaluated at `t`.
    pub fn variable(t: f64) -> Self {
        let mut c = [0.0; JET_LEN];
        c[0] = t;
        c[1] = 1.0;
        Self { c, valid: JET_LEN }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Number of derivatives (including order zero) that are exact.
    pub fn valid(&self) -> usize {
        self.valid
    }

    /// The `k`-th derivative at the expansion point.
    ///
    /// Panics if `k` exceeds the number of valid coefficients; that is a
    /// programming error in the caller's differentiation depth.
    pub fn derivative_value(&self, k: usize) -> f64 {
        assert!(k < self.valid, "jet derivative of order {k} not available (valid = {})", self.valid);
        self.c[k] * FACTORIAL[k]
    }

    /// Derivative of the expanded function, as a jet of one lower order.
    pub fn derivative(&self) -> Self {
        let mut c = [0.0; JET_LEN];
        for (k, ck) in c.iter_mut().take(JET_LEN - 1).enumerate() {
            *ck = (k as f64 + 1.0) * self.c[k + 1];
        }
        Self { c, valid: self.valid.saturating_sub(1) }
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        out.c.iter_mut().for_each(|x| *x *= s);
        out
    }

    pub fn recip(&self) -> Self {
        let a = &self.c;
        let mut b = [0.0; JET_LEN];
        b[0] = 1.0 / a[0];
        for k in 1..JET_LEN {
            let s: f64 = (1..=k).map(|j| a[j] * b[k - j]).sum();
            b[k] = -s * b[0];
        }
        Self { c: b, valid: self.valid }
    }

    pub fn sqrt(&self) -> Self {
        let a = &self.c;
        let mut b = [0.0; JET_LEN];
        b[0] = a[0].sqrt();
        for k in 1..JET_LEN {
            let s: f64 = (1..k).map(|j| b[j] * b[k - j]).sum();
            b[k] = (a[k] - s) / (2.0 * b[0]);
        }
        Self { c: b, valid: self.valid }
    }

    pub fn exp(&self) -> Self {
        let a = &self.c;
        let mut b = [0.0; JET_LEN];
        b[0] = a[0].exp();
        for k in 1..JET_LEN {
            let s: f64 = (1..=k).map(|j| j as f64 * a[j] * b[k - j]).sum();
            b[k] = s / k as f64;
        }
        Self { c: b, valid: self.valid }
    }

    /// Sine and cosine together; their recurrences are coupled.
    pub fn sin_cos(&self) -> (Self, Self) {
        let a = &self.c;
        let mut s = [0.0; JET_LEN];
        let mut c = [0.0; JET_LEN];
        s[0] = a[0].sin();
        c[0] = a[0].cos();
        for k in 1..JET_LEN {
            let mut ds = 0.0;
            let mut dc = 0.0;
            for j in 1..=k {
                ds += j as f64 * a[j] * c[k - j];
                dc += j as f64 * a[j] * s[k - j];
            }
            s[k] = ds / k as f64;
            c[k] = -dc / k as f64;
        }
        (Self { c: s, valid: self.valid }, Self { c, valid: self.valid })
    }

    pub fn sin(&self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Self {
        self.sin_cos().1
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let mut c = self.c;
        c.iter_mut().zip(rhs.c).for_each(|(x, y)| *x += y);
        Jet { c, valid: self.valid.min(rhs.valid) }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        let mut c = self.c;
        c.iter_mut().zip(rhs.c).for_each(|(x, y)| *x -= y);
        Jet { c, valid: self.valid.min(rhs.valid) }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut c = [0.0; JET_LEN];
        for (k, ck) in c.iter_mut().enumerate() {
            *ck = (0..=k).map(|j| self.c[j] * rhs.c[k - j]).sum();
        }
        Jet { c, valid: self.valid.min(rhs.valid) }
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet) -> Jet {
        self * rhs.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.c[0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs.scale(self)
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        rhs + self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        (-rhs) + self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn sin_derivatives_cycle() {
        let t = 0.7_f64;
        let s = Jet::variable(t).sin();
        let expect = [t.sin(), t.cos(), -t.sin(), -t.cos(), t.sin(), t.cos(), -t.sin()];
        for (k, e) in expect.iter().enumerate() {
            assert!(close(s.derivative_value(k), *e, 1e-13), "order {k}");
        }
    }

    #[test]
    fn exp_of_square_matches_closed_form() {
        // d/dt exp(t^2) = 2t exp(t^2); second = (2 + 4t^2) exp(t^2)
        let t = 0.3_f64;
        let x = Jet::variable(t);
        let e = (x * x).exp();
        let v = (t * t).exp();
        assert!(close(e.derivative_value(1), 2.0 * t * v, 1e-14));
        assert!(close(e.derivative_value(2), (2.0 + 4.0 * t * t) * v, 1e-14));
        assert!(close(e.derivative_value(3), (12.0 * t + 8.0 * t.powi(3)) * v, 1e-13));
    }

    #[test]
    fn recip_and_sqrt_agree_with_power_rule() {
        let t = 2.5_f64;
        let x = Jet::variable(t);
        let r = x.recip();
        assert!(close(r.derivative_value(3), -6.0 / t.powi(4), 1e-14));
        let q = x.sqrt();
        assert!(close(q.derivative_value(2), -0.25 * t.powf(-1.5), 1e-14));
        let d = (x * x).sqrt() / x;
        assert!(close(d.derivative_value(1), 0.0, 1e-14));
    }

    #[test]
    fn derivative_tracks_validity() {
        let x = Jet::variable(1.0).sin();
        let d = x.derivative().derivative();
        assert_eq!(d.valid(), JET_LEN - 2);
        assert!(close(d.value(), -(1.0_f64).sin(), 1e-15));
    }

    #[test]
    #[should_panic]
    fn derivative_beyond_validity_panics() {
        let x = Jet::variable(1.0).derivative();
        let _ = x.derivative_value(JET_LEN - 1);
    }
}
