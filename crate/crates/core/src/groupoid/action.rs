//! Action groupoid of `ℂ* ⋉ ℂ` on ℂ², `(w, ζ)·(z₁, z₂) = (wz₁, z₂ + ζz₁)`.
//!
//! The printed action reads `z₂ + wz`; the group law and the isotropy of the
//! zero-residue model force `z₂ + ζz₁`.

use std::sync::Arc;

use num_complex::Complex64;

use super::elliptic::{ratio_from_params, sample_divisor_coord};
use super::{GroupoidChartModel, DEFAULT_COMPOSABLE_TOL};
use crate::divisor::{residue_model_frame, ResidueKind};
use crate::geometry::{cx, realify, SmoothMap};
use crate::rng::{uniform_vec, Rng};

/// `(w, ζ)(w′, ζ′) = (ww′, ζ′ + ζw′)`.
pub fn group_mul(g: (Complex64, Complex64), h: (Complex64, Complex64)) -> (Complex64, Complex64) {
    (g.0 * h.0, h.1 + g.1 * h.0)
}

pub fn group_inv(g: (Complex64, Complex64)) -> (Complex64, Complex64) {
    let wi = g.0.inv();
    (wi, -g.1 * wi)
}

pub fn act(g: (Complex64, Complex64), p: (Complex64, Complex64)) -> (Complex64, Complex64) {
    (g.0 * p.0, p.1 + g.1 * p.0)
}

fn parts(g: &[f64]) -> ((Complex64, Complex64), (Complex64, Complex64)) {
    ((cx(g, 0), cx(g, 2)), (cx(g, 4), cx(g, 6)))
}

fn pack(gamma: (Complex64, Complex64), p: (Complex64, Complex64)) -> Vec<f64> {
    realify(&[gamma.0, gamma.1, p.0, p.1])
}

/// Arrows `(w, ζ, z₁, z₂)` with `s = (z₁, z₂)` and `t = (w, ζ)·(z₁, z₂)`.
pub fn action_groupoid_model() -> GroupoidChartModel {
    let valid = |g: &[f64]| g[0] != 0.0 || g[1] != 0.0;
    let source = SmoothMap::new(8, 4, |g| g[4..8].to_vec()).with_domain(valid);
    let target = SmoothMap::new(8, 4, |g| {
        let (gamma, p) = parts(g);
        let q = act(gamma, p);
        realify(&[q.0, q.1])
    })
    .with_domain(valid);
    let inverse = SmoothMap::new(8, 8, |g| {
        let (gamma, p) = parts(g);
        pack(group_inv(gamma), act(gamma, p))
    })
    .with_domain(valid);
    let unit = SmoothMap::new(4, 8, |p| {
        let one = Complex64::new(1.0, 0.0);
        pack((one, Complex64::new(0.0, 0.0)), (cx(p, 0), cx(p, 2)))
    });
    let multiply = |g: &[f64], h: &[f64]| {
        let ((gg, _), (gh, ph)) = (parts(g), parts(h));
        pack(group_mul(gg, gh), ph)
    };
    let lift = |p: &[f64], free: &[f64]| {
        let gamma = (ratio_from_params(free[0], free[1]), Complex64::new(free[2], free[3]));
        Some(pack(gamma, act(group_inv(gamma), (cx(p, 0), cx(p, 2)))))
    };
    let sampler = |rng: &mut Rng| {
        let z1 = sample_divisor_coord(rng);
        let z2 = uniform_vec(rng, 2, -1.0, 1.0);
        vec![z1.re, z1.im, z2[0], z2[1]]
    };
    let frame = |p: &[f64]| residue_model_frame(ResidueKind::Zero, p).unwrap_or_default();
    GroupoidChartModel {
        name: "action-groupoid".into(),
        arrow_dim: 8,
        base_dim: 4,
        discrete_dims: 0,
        source,
        target,
        inverse,
        unit,
        multiply: Arc::new(multiply),
        composable_tol: DEFAULT_COMPOSABLE_TOL,
        hausdorff: true,
        constraint: None,
        lift: Arc::new(lift),
        lift_free_dim: 4,
        base_sampler: Arc::new(sampler),
        divisor_pairs: vec![0],
        between: None,
        between_free_dim: 0,
        expected_algebroid: Some(Arc::new(frame)),
        elliptic_layout: None,
    }
}
