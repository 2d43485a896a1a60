//! Source-simply-connected groupoids over ℂ: the surface model with
//! `t = ζe^Z`, and the four candidate conventions for the integration of
//! `r²∂x∧∂y` on ℝ² used by the map ψ.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::elliptic::sample_divisor_coord;
use super::{GroupoidChartModel, DEFAULT_COMPOSABLE_TOL};
use crate::divisor::{residue_model_frame, DivisorLocalModel, ResidueKind};
use crate::geometry::{cx, realify, SmoothMap};
use crate::rng::Rng;

fn z_from_free(free: &[f64]) -> Complex64 {
    Complex64::new(free[0], PI * free[1])
}

/// Arrows `(Z, ζ) ∈ ℂ²` over ℂ with `s = ζ`, `t = ζe^Z`.
pub fn ssc_surface_model() -> GroupoidChartModel {
    let source = SmoothMap::new(4, 2, |g| vec![g[2], g[3]]);
    let target = SmoothMap::new(4, 2, |g| realify(&[cx(g, 2) * cx(g, 0).exp()]));
    let inverse = SmoothMap::new(4, 4, |g| {
        let (z, zeta) = (cx(g, 0), cx(g, 2));
        realify(&[-z, zeta * z.exp()])
    });
    let unit = SmoothMap::new(2, 4, |p| vec![0.0, 0.0, p[0], p[1]]);
    let multiply = |g: &[f64], h: &[f64]| realify(&[cx(g, 0) + cx(h, 0), cx(h, 2)]);
    let lift = |p: &[f64], free: &[f64]| {
        let z = z_from_free(free);
        Some(realify(&[z, cx(p, 0) * (-z).exp()]))
    };
    let sampler = |rng: &mut Rng| {
        let z = sample_divisor_coord(rng);
        vec![z.re, z.im]
    };
    let divisor = DivisorLocalModel::with_pairs(2, vec![0]).expect("ℂ with divisor at the origin");
    let frame = move |p: &[f64]| divisor.algebroid_frame(p).unwrap_or_default();
    GroupoidChartModel {
        name: "ssc-surface".into(),
        arrow_dim: 4,
        base_dim: 2,
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
        lift_free_dim: 2,
        base_sampler: Arc::new(sampler),
        divisor_pairs: vec![0],
        between: None,
        between_free_dim: 0,
        expected_algebroid: Some(Arc::new(frame)),
        elliptic_layout: None,
    }
}

/// Which anchor of an arrow `(Z, z)` is the point `z` itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Anchor {
    /// `t(Z, z) = z`, `s(Z, z) = z·e^E`.
    T,
    /// `s(Z, z) = z`, `t(Z, z) = z·e^E`.
    S,
}

/// The exponent `E(z, Z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exponent {
    /// `E = z̄Z`
    ZbarZ,
    /// `E = zZ̄`
    ZZbar,
}

impl fmt::Display for Anchor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Anchor::T => "t(Z,z)=z",
            Anchor::S => "s(Z,z)=z",
        })
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Exponent::ZbarZ => "E=conj(z)Z",
            Exponent::ZZbar => "E=z conj(Z)",
        })
    }
}

pub const ALL_CONVENTIONS: [(Anchor, Exponent); 4] = [
    (Anchor::T, Exponent::ZbarZ),
    (Anchor::T, Exponent::ZZbar),
    (Anchor::S, Exponent::ZbarZ),
    (Anchor::S, Exponent::ZZbar),
];

fn exponent(e: Exponent, z: Complex64, big: Complex64) -> Complex64 {
    match e {
        Exponent::ZbarZ => z.conj() * big,
        Exponent::ZZbar => z * big.conj(),
    }
}

/// One convention for the integration of `(x²+y²)∂x∧∂y`: arrows
/// `(Z, z) ∈ ℂ²`, one anchor equal to `z`, the other `z·e^{E(z,Z)}`.
///
/// In all four cases `E(w, Z′) = E(z, Z) + E(w, W)` is solved by
/// `Z′ = Z + e^{conj E}·W` with the exponent of the arrow whose anchor
/// point is `z`.
pub fn adh_model(anchor: Anchor, exp: Exponent) -> GroupoidChartModel {
    let moved = move |g: &[f64]| {
        let (big, z) = (cx(g, 0), cx(g, 2));
        realify(&[z * exponent(exp, z, big).exp()])
    };
    let fixed = |g: &[f64]| vec![g[2], g[3]];
    let (source, target) = match anchor {
        Anchor::T => (SmoothMap::new(4, 2, moved), SmoothMap::new(4, 2, fixed)),
        Anchor::S => (SmoothMap::new(4, 2, fixed), SmoothMap::new(4, 2, moved)),
    };
    let inverse = SmoothMap::new(4, 4, move |g| {
        let (big, z) = (cx(g, 0), cx(g, 2));
        let e = exponent(exp, z, big);
        realify(&[-(-e.conj()).exp() * big, z * e.exp()])
    });
    let unit = SmoothMap::new(2, 4, |p| vec![0.0, 0.0, p[0], p[1]]);
    let multiply = move |g: &[f64], h: &[f64]| {
        let (zg, g0) = (cx(g, 0), cx(g, 2));
        let (zh, h0) = (cx(h, 0), cx(h, 2));
        match anchor {
            Anchor::T => realify(&[zg + exponent(exp, g0, zg).conj().exp() * zh, g0]),
            Anchor::S => realify(&[zh + exponent(exp, h0, zh).conj().exp() * zg, h0]),
        }
    };
    let inv = inverse.clone();
    let lift = move |p: &[f64], free: &[f64]| {
        // keep |E| ≤ 1 so sampled chains do not run off to infinity
        let big = z_from_free(free) * (0.3 / cx(p, 0).norm().max(1.0));
        let g = realify(&[big, cx(p, 0)]);
        match anchor {
            Anchor::T => Some(g),
            // inverse of an arrow with source p
            Anchor::S => inv.eval(&g).ok(),
        }
    };
    let sampler = |rng: &mut Rng| {
        let z = sample_divisor_coord(rng);
        vec![z.re, z.im]
    };
    let frame = |p: &[f64]| residue_model_frame(ResidueKind::Nonzero, p).unwrap_or_default();
    let tag = match (anchor, exp) {
        (Anchor::T, Exponent::ZbarZ) => "t,zbarZ",
        (Anchor::T, Exponent::ZZbar) => "t,zZbar",
        (Anchor::S, Exponent::ZbarZ) => "s,zbarZ",
        (Anchor::S, Exponent::ZZbar) => "s,zZbar",
    };
    GroupoidChartModel {
        name: format!("adh[{tag}]"),
        arrow_dim: 4,
        base_dim: 2,
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
        lift_free_dim: 2,
        base_sampler: Arc::new(sampler),
        divisor_pairs: vec![0],
        between: None,
        between_free_dim: 0,
        expected_algebroid: Some(Arc::new(frame)),
        elliptic_layout: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::sup_distance;
    use crate::rng::stream;

    #[test]
    fn unit_and_inverse_laws() {
        let m = ssc_surface_model();
        let mut rng = stream(3, "ssc");
        for _ in 0..10_000 {
            let g = m.sample_arrow(&mut rng).unwrap();
            let (t, s) = m.anchor_pair(&g).unwrap();
            let left = m.m(&m.unit_at(&t).unwrap(), &g).unwrap();
            let right = m.m(&g, &m.unit_at(&s).unwrap()).unwrap();
            assert!(sup_distance(&left, &g) < 1e-12 && sup_distance(&right, &g) < 1e-12);
            let gi = m.inv(&g).unwrap();
            assert!(sup_distance(&m.t(&gi).unwrap(), &s) < 1e-12);
            let u = m.m(&g, &gi).unwrap();
            assert!(sup_distance(&u, &m.unit_at(&t).unwrap()) < 1e-9);
        }
    }

    #[test]
    fn loops_around_the_origin_compose_additively() {
        let m = ssc_surface_model();
        let zeta = Complex64::new(0.6, -0.3);
        let lp = realify(&[Complex64::new(0.0, 2.0 * PI), zeta]);
        let (t, s) = m.anchor_pair(&lp).unwrap();
        assert!(sup_distance(&t, &s) < 1e-14);
        let twice = m.m(&lp, &lp).unwrap();
        assert!(sup_distance(&twice, &realify(&[Complex64::new(0.0, 4.0 * PI), zeta])) < 1e-14);
        // distinct arrows with the same endpoints
        assert!(sup_distance(&twice, &m.unit_at(&s).unwrap()) > 1.0);
    }

    #[test]
    fn every_convention_is_a_groupoid() {
        for (a, e) in ALL_CONVENTIONS {
            let m = adh_model(a, e);
            let mut rng = stream(4, m.name());
            for _ in 0..1_000 {
                let g = m.sample_arrow(&mut rng).unwrap();
                let h = m.sample_composable(&g, &mut rng).unwrap();
                let k = m.sample_composable(&h, &mut rng).unwrap();
                let gh = m.m(&g, &h).unwrap();
                assert!(sup_distance(&m.s(&gh).unwrap(), &m.s(&h).unwrap()) < 1e-9, "{}", m.name());
                assert!(sup_distance(&m.t(&gh).unwrap(), &m.t(&g).unwrap()) < 1e-9, "{}", m.name());
                let l = m.m(&gh, &k).unwrap();
                let r = m.m(&g, &m.m(&h, &k).unwrap()).unwrap();
                assert!(sup_distance(&l, &r) < 1e-9, "{} {:e} {l:?}", m.name(), sup_distance(&l, &r));
                let u = m.m(&m.inv(&g).unwrap(), &g).unwrap();
                let d = sup_distance(&u, &m.unit_at(&m.s(&g).unwrap()).unwrap());
                assert!(d < 1e-9, "{} {d:e} {g:?} {u:?}", m.name());
            }
        }
    }
}
