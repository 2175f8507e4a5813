//! Closed-form generators used by the examples and the test suite.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::Vector3;

use crate::geometry::{CurveDomain, PlaneCurve, SurfaceDomain, SurfaceMap, SurfacePoint};
use crate::jet::Jet;
use crate::lorentz::LorentzVector;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Circle {
    pub radius: f64,
}

impl PlaneCurve for Circle {
    fn eval(&self, t: Jet) -> [Jet; 2] {
        let (s, c) = t.sin_cos();
        [c * self.radius, s * self.radius]
    }
}

/// `(a cos t, b sin t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ellipse {
    pub a: f64,
    pub b: f64,
}

impl PlaneCurve for Ellipse {
    fn eval(&self, t: Jet) -> [Jet; 2] {
        let (s, c) = t.sin_cos();
        [c * self.a, s * self.b]
    }
}

/// `(1 - 2 sin t)(cos t, sin t)`: locally convex with one self-intersection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Limacon;

impl PlaneCurve for Limacon {
    fn eval(&self, t: Jet) -> [Jet; 2] {
        let (s, c) = t.sin_cos();
        let r = 1.0 - s * 2.0;
        [r * c, r * s]
    }
}

/// `(cos t, sin t + amplitude sin 2t)`; for `amplitude > 1/4` the curvature
/// changes sign.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Inflected {
    pub amplitude: f64,
}

impl PlaneCurve for Inflected {
    fn eval(&self, t: Jet) -> [Jet; 2] {
        let (s, c) = t.sin_cos();
        [c, s + (t * 2.0).sin() * self.amplitude]
    }
}

/// `(t, t^2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Parabola;

impl PlaneCurve for Parabola {
    fn eval(&self, t: Jet) -> [Jet; 2] {
        [t, t * t]
    }
}

/// The unit circle traversed `turns` times over `[0, 2 pi)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WoundCircle {
    pub turns: f64,
}

impl PlaneCurve for WoundCircle {
    fn eval(&self, t: Jet) -> [Jet; 2] {
        let (s, c) = (t * self.turns).sin_cos();
        [c, s]
    }
}

/// Truncated Fourier series, `x(t) = sum_k x_cos[k] cos kt + x_sin[k] sin kt`
/// and likewise for `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct Fourier {
    pub x_cos: Vec<f64>,
    pub x_sin: Vec<f64>,
    pub y_cos: Vec<f64>,
    pub y_sin: Vec<f64>,
}

impl PlaneCurve for Fourier {
    fn eval(&self, t: Jet) -> [Jet; 2] {
        let series = |cos: &[f64], sin: &[f64]| {
            let terms = cos.len().max(sin.len());
            let mut acc = Jet::constant(0.0);
            for k in 0..terms {
                let (s, c) = (t * k as f64).sin_cos();
                acc = acc + c * cos.get(k).copied().unwrap_or(0.0) + s * sin.get(k).copied().unwrap_or(0.0);
            }
            acc
        };
        [series(&self.x_cos, &self.x_sin), series(&self.y_cos, &self.y_sin)]
    }
}

/// Smooth compactly supported bump `exp(1 - 1/(1 - u^2))` on `(-1, 1)`, with
/// peak value 1 at `u = 0`.
pub fn bump(u: Jet) -> Jet {
    let v = u.value();
    if v.abs() >= 1.0 {
        return Jet::constant(0.0);
    }
    (1.0 - (1.0 - u * u).recip()).exp()
}

/// `e^{omega(t)} (cos t, sin t)` on `[0, 4 pi]` with
/// `omega(t) = amplitude * bump((t - 3 pi) / width)`.
///
/// Outside the bump the two turns coincide; inside it the second turn bulges
/// outward. `amplitude = 0` gives the doubly traversed unit circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spiral {
    pub amplitude: f64,
    pub width: f64,
}

impl Spiral {
    pub const PERIOD: f64 = 4.0 * PI;

    pub fn new(amplitude: f64, width: f64) -> Self {
        Self { amplitude, width }
    }

    pub fn omega(&self, t: f64) -> f64 {
        self.omega_jet(Jet::constant(t)).value()
    }

    fn omega_jet(&self, t: Jet) -> Jet {
        if self.amplitude == 0.0 {
            return Jet::constant(0.0);
        }
        bump((t - 3.0 * PI) * (1.0 / self.width)) * self.amplitude
    }

    pub fn domain() -> CurveDomain {
        CurveDomain::Closed { start: 0.0, period: Self::PERIOD }
    }
}

impl Default for Spiral {
    fn default() -> Self {
        Self { amplitude: 0.5, width: 0.5 }
    }
}

impl PlaneCurve for Spiral {
    fn eval(&self, t: Jet) -> [Jet; 2] {
        let r = self.omega_jet(t).exp();
        let (s, c) = t.sin_cos();
        [r * c, r * s]
    }
}

/// `R (sin theta cos phi, sin theta sin phi, cos theta)` over `(theta, phi)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sphere {
    pub radius: f64,
}

impl SurfaceMap for Sphere {
    fn eval(&self, theta: f64, phi: f64) -> SurfacePoint {
        let r = self.radius;
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let p = Vector3::new(st * cp, st * sp, ct) * r;
        SurfacePoint {
            p,
            pu: Vector3::new(ct * cp, ct * sp, -st) * r,
            pv: Vector3::new(-st * sp, st * cp, 0.0) * r,
            puu: -p,
            puv: Vector3::new(-ct * sp, ct * cp, 0.0) * r,
            pvv: Vector3::new(-st * cp, -st * sp, 0.0) * r,
        }
    }
}

/// Graph of `(u^2 + v^2) / 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Paraboloid;

impl SurfaceMap for Paraboloid {
    fn eval(&self, u: f64, v: f64) -> SurfacePoint {
        SurfacePoint {
            p: Vector3::new(u, v, 0.5 * (u * u + v * v)),
            pu: Vector3::new(1.0, 0.0, u),
            pv: Vector3::new(0.0, 1.0, v),
            puu: Vector3::new(0.0, 0.0, 1.0),
            puv: Vector3::zeros(),
            pvv: Vector3::new(0.0, 0.0, 1.0),
        }
    }
}

/// A sample of a null front given directly in `R^3_1`: a point and a null
/// normal at it.
#[derive(Clone, Debug, PartialEq)]
pub struct FrontSample {
    pub point: LorentzVector,
    pub normal: LorentzVector,
}

/// The light-cone immersion `(u^2 + v^2, 2uv, u^2 - v^2)` sampled on a square
/// grid of dyadic parameters in `[-1, 1]^2` (origin excluded), with the
/// E-normalised null normal `F / (u^2 + v^2)`. Dyadic inputs keep
/// `<F, F> = 0` exact in floating point.
pub fn lightcone_samples(half: usize) -> Vec<FrontSample> {
    let step = 1.0 / half.next_power_of_two() as f64;
    let n = half.next_power_of_two() as i64;
    let mut out = Vec::new();
    for i in -n..=n {
        for j in -n..=n {
            if i == 0 && j == 0 {
                continue;
            }
            out.push(lightcone_sample(i as f64 * step, j as f64 * step));
        }
    }
    out
}

fn lightcone_sample(u: f64, v: f64) -> FrontSample {
    let h = u * u + v * v;
    let point = LorentzVector::new(vec![h, 2.0 * u * v, u * u - v * v]).expect("finite");
    let normal = LorentzVector::new(vec![1.0, 2.0 * u * v / h, (u * u - v * v) / h]).expect("finite");
    FrontSample { point, normal }
}

/// Light-cone samples on the square ring `max(|i|, |j|) = n` of the dyadic
/// grid with step `1 / n` (`n` rounded up to a power of two), ordered
/// counter-clockwise around the origin of the `(u, v)` plane.
pub fn lightcone_ring(n: usize) -> Vec<FrontSample> {
    let n = n.next_power_of_two() as i64;
    let step = 1.0 / n as f64;
    let mut ij = Vec::with_capacity(8 * n as usize);
    for j in -n..n {
        ij.push((n, j));
    }
    for i in (-n + 1..=n).rev() {
        ij.push((i, n));
    }
    for j in (-n + 1..=n).rev() {
        ij.push((-n, j));
    }
    for i in -n..n {
        ij.push((i, -n));
    }
    ij.into_iter().map(|(i, j)| lightcone_sample(i as f64 * step, j as f64 * step)).collect()
}

/// What a registry name resolves to.
#[derive(Clone, Debug)]
pub enum Generator {
    Curve { curve: Arc<dyn PlaneCurve>, domain: CurveDomain, flip: bool },
    Surface { map: Arc<dyn SurfaceMap>, domain: SurfaceDomain, orientation: f64 },
    LightCone,
}

/// Parameters for the registry; unused fields are ignored by each generator.
#[derive(Clone, Debug, PartialEq)]
pub struct BuiltinParams {
    pub radius: f64,
    pub semi_axes: (f64, f64),
    pub bump_amplitude: f64,
    pub bump_width: f64,
    pub inflection_amplitude: f64,
    pub fourier: Option<Fourier>,
}

impl Default for BuiltinParams {
    fn default() -> Self {
        let spiral = Spiral::default();
        Self {
            radius: 1.0,
            semi_axes: (2.0, 1.0),
            bump_amplitude: spiral.amplitude,
            bump_width: spiral.width,
            inflection_amplitude: 0.9,
            fourier: None,
        }
    }
}

pub const NAMES: &[&str] = &[
    "ellipse",
    "limacon",
    "circle",
    "circle-outward",
    "spiral",
    "lightcone",
    "sphere",
    "paraboloid",
    "inflected",
    "parabola",
    "double-circle",
    "fourier",
];

/// Resolves a built-in generator by name.
pub fn lookup(name: &str, p: &BuiltinParams) -> Option<Generator> {
    let closed = CurveDomain::full_turn();
    let curve = |c: Arc<dyn PlaneCurve>| Generator::Curve { curve: c, domain: closed, flip: false };
    Some(match name {
        "ellipse" => curve(Arc::new(Ellipse { a: p.semi_axes.0, b: p.semi_axes.1 })),
        "limacon" => curve(Arc::new(Limacon)),
        "circle" => curve(Arc::new(Circle { radius: p.radius })),
        "circle-outward" => Generator::Curve { curve: Arc::new(Circle { radius: p.radius }), domain: closed, flip: true },
        "spiral" => Generator::Curve {
            curve: Arc::new(Spiral::new(p.bump_amplitude, p.bump_width)),
            domain: Spiral::domain(),
            flip: false,
        },
        "inflected" => curve(Arc::new(Inflected { amplitude: p.inflection_amplitude })),
        "parabola" => Generator::Curve {
            curve: Arc::new(Parabola),
            domain: CurveDomain::Open { start: -1.0, end: 1.0 },
            flip: false,
        },
        "double-circle" => curve(Arc::new(WoundCircle { turns: 2.0 })),
        "fourier" => curve(Arc::new(p.fourier.clone()?)),
        "sphere" => Generator::Surface {
            map: Arc::new(Sphere { radius: p.radius }),
            domain: SurfaceDomain::LatLong,
            orientation: -1.0,
        },
        "paraboloid" => Generator::Surface {
            map: Arc::new(Paraboloid),
            domain: SurfaceDomain::Patch { u: (-1.0, 1.0), v: (-1.0, 1.0) },
            orientation: 1.0,
        },
        "lightcone" => Generator::LightCone,
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorentz::{is_future_pointing, minkowski_inner};

    #[test]
    fn bump_is_flat_at_support_edge() {
        let b = bump(Jet::variable(0.999));
        assert!(b.value() < 1e-200);
        assert_eq!(bump(Jet::variable(0.0)).value(), 1.0);
        assert_eq!(bump(Jet::variable(1.5)).value(), 0.0);
    }

    #[test]
    fn spiral_turns_coincide_outside_bump() {
        let s = Spiral::default();
        for t in [0.1, 1.0, 2.0, 0.5 * PI] {
            let a = s.eval(Jet::constant(t));
            let b = s.eval(Jet::constant(t + 2.0 * PI));
            assert!((a[0].value() - b[0].value()).abs() < 1e-14);
            assert!((a[1].value() - b[1].value()).abs() < 1e-14);
        }
        assert!(s.omega(3.0 * PI) > 0.49);
        assert_eq!(s.omega(3.0 * PI + 0.6), 0.0);
    }

    #[test]
    fn lightcone_samples_are_exactly_null() {
        let samples = lightcone_samples(8);
        assert_eq!(samples.len(), 17 * 17 - 1);
        for s in &samples {
            assert_eq!(minkowski_inner(&s.point, &s.point).unwrap(), 0.0);
            assert!(minkowski_inner(&s.normal, &s.normal).unwrap().abs() < 1e-15);
            assert!(is_future_pointing(&s.normal).unwrap());
        }
    }

    #[test]
    fn lightcone_ring_is_a_loop() {
        let ring = lightcone_ring(4);
        assert_eq!(ring.len(), 32);
        // Consecutive samples are grid neighbours, including the wrap.
        for k in 0..ring.len() {
            let a = &ring[k].point;
            let b = &ring[(k + 1) % ring.len()].point;
            assert!(a.max_abs_diff(b) < 1.0);
        }
    }

    #[test]
    fn registry_knows_every_name() {
        let p = BuiltinParams {
            fourier: Some(Fourier { x_cos: vec![0.0, 1.0], x_sin: vec![], y_cos: vec![], y_sin: vec![0.0, 1.0] }),
            ..Default::default()
        };
        for name in NAMES {
            assert!(lookup(name, &p).is_some(), "{name}");
        }
        assert!(lookup("hyperboloid", &p).is_none());
    }
}
