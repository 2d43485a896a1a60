//! Groupoid morphisms between the symplectic local models and elliptic
//! charts, the map ψ out of the source-simply-connected integration, and
//! `β = (t, s)` into the pair groupoid.

use num_complex::Complex64;

use super::elliptic::elliptic_chart;
use super::{GroupoidChartModel, ModelError};
use crate::geometry::{cx, realify, FormField, FormKind, SmoothMap};

/// Below this `|z|`, ψ uses its power series in `z̄Z`.
pub const PSI_SERIES_THRESHOLD: f64 = 1e-6;

/// Target of φ for the nonzero-residue model: the elliptic chart over ℂ
/// with arrows `(a, b) ∈ ℂ × ℂ*`.
pub fn nonzero_target() -> GroupoidChartModel {
    elliptic_chart("H[nonzero]", 2, vec![0]).expect("elliptic chart over ℂ")
}

/// Target of φ for the zero-residue model: the elliptic chart over
/// `ℂ × ℝ²` with divisor in the first factor, arrows `(X, Y, a, b)`.
pub fn zero_target() -> GroupoidChartModel {
    elliptic_chart("H[zero]", 4, vec![0]).expect("elliptic chart over ℂ²")
}

/// `φ(x₁, x₂, a, b) = (x₁ + ix₂, (a + ib)(x₁ − ix₂) + 1)`.
pub fn morphism_phi_nonzero() -> SmoothMap {
    SmoothMap::new(4, 4, |g| {
        let x = cx(g, 0);
        let c = cx(g, 2);
        realify(&[x, c * x.conj() + 1.0])
    })
}

/// `φ(z, a, b, c) = (X, Y, a, b)` with `X = z`, `Y = ac + z`.
pub fn morphism_phi_zero() -> SmoothMap {
    SmoothMap::new(8, 8, |g| {
        let (z, a, b, c) = (cx(g, 0), cx(g, 2), cx(g, 4), cx(g, 6));
        realify(&[z, a * c + z, a, b])
    })
    .with_domain(|g| g[4] != 0.0 || g[5] != 0.0)
}

/// `(e^{z̄Z} − 1)/z̄`, by its series near `z = 0`.
pub fn psi_fibre(big: Complex64, z: Complex64) -> Complex64 {
    if z.norm() >= PSI_SERIES_THRESHOLD {
        let zb = z.conj();
        return ((zb * big).exp() - 1.0) / zb;
    }
    // Z·Σ_k u^k/(k+1)!, u = z̄Z
    let u = z.conj() * big;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..40 {
        term *= u / (k as f64 + 1.0);
        sum += term;
        if term.norm() < 1e-18 {
            break;
        }
    }
    big * sum
}

/// `ψ(Z, z) = (z, (e^{z̄Z} − 1)/z̄)` into the nonzero-residue model.
pub fn morphism_psi() -> SmoothMap {
    SmoothMap::new(4, 4, |g| {
        let (big, z) = (cx(g, 0), cx(g, 2));
        realify(&[z, psi_fibre(big, z)])
    })
}

/// `g ↦ ((1/b, −c/b), s(g))` from the zero-residue model to the action groupoid.
pub fn morphism_chi_zero() -> SmoothMap {
    SmoothMap::new(8, 8, |g| {
        let (z, a, b, c) = (cx(g, 0), cx(g, 2), cx(g, 4), cx(g, 6));
        let bi = b.inv();
        realify(&[bi, -c * bi, a * b, a * c + z])
    })
    .with_domain(|g| g[4] != 0.0 || g[5] != 0.0)
}

/// `β(g) = (t(g), s(g))`.
pub fn morphism_beta(model: &GroupoidChartModel) -> SmoothMap {
    let n = model.base_dim();
    let m = model.clone();
    let dom = model.clone();
    SmoothMap::new(model.arrow_dim(), 2 * n, move |g| match m.anchor_pair(g) {
        Ok((mut t, s)) => {
            t.extend(s);
            t
        }
        Err(_) => vec![f64::NAN; 2 * n],
    })
    .with_domain(move |g| dom.is_arrow(g))
}

fn cross(p: Complex64, q: Complex64) -> f64 {
    (p.conj() * q).im
}

/// `Ω_H = t*ω − s*ω` on the nonzero-residue target, `ω = dx∧dy/r²`,
/// with exact differentials. Defined where `a ≠ 0`.
pub fn omega_h_nonzero() -> FormField {
    FormField::new(2, 4, FormKind::Real, |g, v| {
        let (a, b) = (cx(g, 0), cx(g, 2));
        let ds = |v: &[f64]| b * cx(v, 0) + a * cx(v, 2);
        let (t1, t2) = (cx(v[0], 0), cx(v[1], 0));
        let val = cross(t1, t2) / a.norm_sqr() - cross(ds(v[0]), ds(v[1])) / (a * b).norm_sqr();
        Complex64::new(val, 0.0)
    })
    .with_domain(|g| (g[0] != 0.0 || g[1] != 0.0) && (g[2] != 0.0 || g[3] != 0.0))
}

/// `Ω_H = t*ω − s*ω` on the zero-residue target, `ω = d log w ∧ dz`.
/// Defined where `a ≠ 0`.
pub fn omega_h_zero() -> FormField {
    FormField::new(2, 8, FormKind::Complex, |g, v| {
        let (a, b) = (cx(g, 4), cx(g, 6));
        let log_wedge = |w: Complex64, dw1: Complex64, dz1: Complex64, dw2: Complex64, dz2: Complex64| {
            (dw1 * dz2 - dw2 * dz1) / w
        };
        let dt = |v: &[f64]| (cx(v, 4), cx(v, 0));
        let ds = |v: &[f64]| (b * cx(v, 4) + a * cx(v, 6), cx(v, 2));
        let (t1, t2) = (dt(v[0]), dt(v[1]));
        let (s1, s2) = (ds(v[0]), ds(v[1]));
        log_wedge(a, t1.0, t1.1, t2.0, t2.1) - log_wedge(a * b, s1.0, s1.1, s2.0, s2.1)
    })
    .with_domain(|g| (g[4] != 0.0 || g[5] != 0.0) && (g[6] != 0.0 || g[7] != 0.0))
}

/// The candidate integration for ψ is compared against this target.
pub fn psi_target() -> Result<GroupoidChartModel, ModelError> {
    Ok(super::symplectic_nonzero_residue_model(None).groupoid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::sup_distance;
    use crate::groupoid::{symplectic_nonzero_residue_model, symplectic_zero_residue_model};
    use crate::rng::stream;

    #[test]
    fn phi_nonzero_intertwines_anchors() {
        let g = symplectic_nonzero_residue_model(None).groupoid;
        let h = nonzero_target();
        let phi = morphism_phi_nonzero();
        let mut rng = stream(1, "phi-nonzero-unit");
        for _ in 0..10_000 {
            let a = g.sample_arrow(&mut rng).unwrap();
            let b = phi.eval(&a).unwrap();
            assert!(sup_distance(&h.s(&b).unwrap(), &g.s(&a).unwrap()) < 1e-14);
            assert!(sup_distance(&h.t(&b).unwrap(), &g.t(&a).unwrap()) < 1e-15);
        }
    }

    #[test]
    fn phi_zero_intertwines_anchors() {
        let g = symplectic_zero_residue_model().groupoid;
        let h = zero_target();
        let phi = morphism_phi_zero();
        let mut rng = stream(1, "phi-zero-unit");
        for _ in 0..1_000 {
            let a = g.sample_arrow(&mut rng).unwrap();
            let b = phi.eval(&a).unwrap();
            assert!(sup_distance(&h.s(&b).unwrap(), &g.s(&a).unwrap()) < 1e-14);
            assert!(sup_distance(&h.t(&b).unwrap(), &g.t(&a).unwrap()) < 1e-15);
        }
    }

    #[test]
    fn psi_series_branch_at_the_origin() {
        let psi = morphism_psi();
        assert_eq!(psi.eval(&[0.3, -0.7, 0.0, 0.0]).unwrap(), vec![0.0, 0.0, 0.3, -0.7]);
        // both branches agree across the threshold
        let big = Complex64::new(0.8, 1.9);
        let z = Complex64::new(PSI_SERIES_THRESHOLD * 1.0001, 0.0);
        let zb = z.conj();
        let closed = ((zb * big).exp() - 1.0) / zb;
        let series = psi_fibre(big, Complex64::new(PSI_SERIES_THRESHOLD * 0.9999, 0.0));
        assert!((closed - series).norm() < 1e-9);
    }

    #[test]
    fn chi_is_an_isomorphism_onto_the_action_groupoid() {
        let g = symplectic_zero_residue_model().groupoid;
        let act = crate::groupoid::action_groupoid_model();
        let chi = morphism_chi_zero();
        let mut rng = stream(2, "chi");
        for _ in 0..1_000 {
            let a = g.sample_arrow(&mut rng).unwrap();
            let b = g.sample_composable(&a, &mut rng).unwrap();
            let (ca, cb) = (chi.eval(&a).unwrap(), chi.eval(&b).unwrap());
            assert!(sup_distance(&act.s(&ca).unwrap(), &g.s(&a).unwrap()) < 1e-12);
            assert!(sup_distance(&act.t(&ca).unwrap(), &g.t(&a).unwrap()) < 1e-12);
            let lhs = chi.eval(&g.m(&a, &b).unwrap()).unwrap();
            let rhs = act.m(&ca, &cb).unwrap();
            assert!(sup_distance(&lhs, &rhs) < 1e-9);
        }
    }
}
