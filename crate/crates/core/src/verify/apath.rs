//! A-paths of rescaled curves approaching a smooth divisor.
//!
//! For a curve `(x(τ), r(τ)e^{iθ(τ)})` off the divisor, the rescaled curve
//! `(x, t·r·e^{iθ})` is the base path of the A-path with coefficients
//! `(ẋ, d log r/dτ, θ̇)` in the frame `∂x, r∂r, ∂θ`. The coefficients do not
//! depend on `t`, so the limit `t → 0` is an A-path over the divisor.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DVector;

use super::{CheckReport, Criterion, Tally, VerifyError};
use crate::divisor::DivisorLocalModel;
use crate::geometry::{Point, ToleranceProfile};

pub const APATH_TOL: f64 = 1e-12;
pub const ANCHOR_TOL: f64 = 1e-6;
/// Rescaling factors used by [`check_apath`].
pub const RESCALINGS: [f64; 7] = [1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
const GRID: usize = 101;

type RealCurve = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type VecCurve = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

/// `τ ↦ (x(τ), r(τ)e^{iθ(τ)})` on `[0, 1]`.
#[derive(Clone)]
pub struct Curve {
    pub name: String,
    pub x: VecCurve,
    pub r: RealCurve,
    pub theta: RealCurve,
}

impl Curve {
    pub fn new<X, R, T>(name: &str, x: X, r: R, theta: T) -> Curve
    where
        X: Fn(f64) -> Vec<f64> + Send + Sync + 'static,
        R: Fn(f64) -> f64 + Send + Sync + 'static,
        T: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Curve { name: name.to_string(), x: Arc::new(x), r: Arc::new(r), theta: Arc::new(theta) }
    }

    fn real_dim(&self) -> usize {
        (self.x)(0.0).len()
    }
}

#[derive(Clone)]
pub struct APath {
    curve: Curve,
    t: f64,
    h: f64,
    divisor: DivisorLocalModel,
}

fn derivative(f: &dyn Fn(f64) -> f64, tau: f64, h: f64) -> f64 {
    (f(tau + h) - f(tau - h)) / (2.0 * h)
}

impl APath {
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn dim(&self) -> usize {
        self.divisor.dim()
    }

    /// `(x(τ), t·r(τ)e^{iθ(τ)})` with the complex factor last.
    pub fn base(&self, tau: f64) -> Point {
        let mut p = (self.curve.x)(tau);
        let rho = self.t * (self.curve.r)(tau);
        let th = (self.curve.theta)(tau);
        p.push(rho * th.cos());
        p.push(rho * th.sin());
        p
    }

    /// `(ẋ, d log r/dτ, θ̇)`; `t` does not enter.
    pub fn coefficients(&self, tau: f64) -> Vec<f64> {
        let h = self.h;
        let nr = self.curve.real_dim();
        let mut out = Vec::with_capacity(nr + 2);
        for i in 0..nr {
            out.push(derivative(&|s| (self.curve.x)(s)[i], tau, h));
        }
        out.push(derivative(&|s| (self.curve.r)(s).ln(), tau, h));
        out.push(derivative(&*self.curve.theta, tau, h));
        out
    }

    /// `|ρ(a(τ)) − d/dτ base(τ)|_∞`.
    pub fn anchor_residual(&self, tau: f64) -> f64 {
        let frame = self.divisor.algebroid_frame(&self.base(tau)).unwrap_or_default();
        let a = self.coefficients(tau);
        let mut pushed = DVector::zeros(self.dim());
        for (c, v) in a.iter().zip(&frame) {
            pushed += v * *c;
        }
        let h = self.h;
        let (plus, minus) = (self.base(tau + h), self.base(tau - h));
        (0..self.dim())
            .map(|i| (pushed[i] - (plus[i] - minus[i]) / (2.0 * h)).abs())
            .fold(0.0, f64::max)
    }

    /// Distance of `base(τ)` from the divisor.
    pub fn divisor_distance(&self, tau: f64) -> f64 {
        let p = self.base(tau);
        let n = p.len();
        p[n - 2].hypot(p[n - 1])
    }
}

/// The A-path of the curve rescaled by `t ∈ (0, 1]` in the normal direction.
pub fn apath_rescale(gamma: &Curve, t: f64, prof: &ToleranceProfile) -> Result<APath, VerifyError> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(VerifyError::InvalidConfig(format!("rescaling factor must lie in (0, 1], got {t}")));
    }
    let h = prof.h;
    for i in 0..GRID {
        let tau = i as f64 / (GRID - 1) as f64;
        for s in [tau - h, tau, tau + h] {
            let r = (gamma.r)(s);
            if !(r > 0.0) {
                return Err(VerifyError::DegenerateRadius { tau: s, r });
            }
        }
    }
    let divisor = DivisorLocalModel::new(gamma.real_dim() + 2, 1).map_err(crate::groupoid::ModelError::from)?;
    Ok(APath { curve: gamma.clone(), t, h, divisor })
}

/// Curves with constant radius, exponential radius, and a generic one,
/// with `real_dim` real coordinates.
pub fn standard_curves(real_dim: usize) -> Vec<Curve> {
    let x = move |tau: f64| (0..real_dim).map(|i| ((i + 1) as f64 * tau).sin() - 0.3 * i as f64).collect::<Vec<f64>>();
    vec![
        Curve::new("constant-radius", x, |_| 0.8, |tau| 2.0 * PI * tau),
        Curve::new("exponential-radius", x, |tau: f64| tau.exp(), |tau| 0.5 - tau),
        Curve::new("generic", x, |tau: f64| 0.5 + 0.4 * (3.0 * tau).cos(), |tau: f64| tau * tau - 1.0),
    ]
}

/// Three reports over [`standard_curves`] and [`RESCALINGS`]: coefficients
/// against `t = 1`, the anchor condition, and the distance of the base path
/// from the divisor against `t·r(τ)`.
pub fn check_apath(n: usize, prof: &ToleranceProfile) -> Result<Vec<CheckReport>, VerifyError> {
    if n < 2 {
        return Err(VerifyError::InvalidConfig(format!("A-paths need dimension ≥ 2, got {n}")));
    }
    let label = format!("case1 frame, n={n}");
    let mut same = Tally::new("apath.t-independence", &label, Criterion::AllBelow, APATH_TOL, prof, 0);
    let mut anchor = Tally::new("apath.anchor", &label, Criterion::AllBelow, ANCHOR_TOL, prof, 0);
    let mut limit = Tally::new("apath.limit", &label, Criterion::AllBelow, APATH_TOL, prof, 0);
    for curve in standard_curves(n - 2) {
        let reference = apath_rescale(&curve, 1.0, prof)?;
        let mut last_distance = 0.0f64;
        for &t in &RESCALINGS {
            let path = apath_rescale(&curve, t, prof)?;
            last_distance = 0.0;
            for i in 0..GRID {
                let tau = i as f64 / (GRID - 1) as f64;
                let inputs = || vec![vec![t, tau]];
                let a = path.coefficients(tau);
                let b = reference.coefficients(tau);
                let d = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
                same.record(&curve.name, d, inputs);
                anchor.record(&curve.name, path.anchor_residual(tau), inputs);
                let dist = path.divisor_distance(tau);
                last_distance = last_distance.max(dist);
                limit.record(&curve.name, (dist - t * (curve.r)(tau)).abs(), inputs);
            }
        }
        limit.note(format!("{}: max distance from the divisor at t = 1e-6 is {last_distance:.3e}", curve.name));
    }
    Ok(vec![same.finish(), anchor.finish(), limit.finish()])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_coefficients() {
        let prof = ToleranceProfile::default();
        let curves = standard_curves(2);
        let k = 2; // radial slot
        for t in RESCALINGS {
            let c = apath_rescale(&curves[0], t, &prof).unwrap();
            let e = apath_rescale(&curves[1], t, &prof).unwrap();
            for tau in [0.0, 0.3, 1.0] {
                assert_eq!(c.coefficients(tau)[k], 0.0);
                assert!((e.coefficients(tau)[k] - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn base_path_converges_to_the_divisor() {
        let prof = ToleranceProfile::default();
        let gamma = &standard_curves(2)[2];
        let far = apath_rescale(gamma, 1.0, &prof).unwrap();
        let near = apath_rescale(gamma, 1e-6, &prof).unwrap();
        assert!(near.divisor_distance(0.4) < 1e-6);
        assert_eq!(far.base(0.4)[..2], near.base(0.4)[..2]);
    }

    #[test]
    fn degenerate_radius_is_rejected() {
        let prof = ToleranceProfile::default();
        let bad = Curve::new("through-zero", |_| vec![0.0], |tau| tau - 0.5, |_| 0.0);
        assert!(matches!(apath_rescale(&bad, 0.5, &prof), Err(VerifyError::DegenerateRadius { .. })));
        assert!(apath_rescale(&standard_curves(1)[0], 0.0, &prof).is_err());
    }

    #[test]
    fn all_reports_pass() {
        for r in check_apath(4, &ToleranceProfile::default()).unwrap() {
            assert!(r.passed(), "{}", r.summary());
        }
    }
}
