//! Symplectic groupoids of the two elliptic Poisson local models, and the
//! pair groupoid of the plane as a reference.
//!
//! The closed forms for `Ω` below are `t*ω − s*ω` worked out by hand and
//! checked against the numerical pullback. The printed variants are kept
//! only as regression targets; see [`printed_nonzero_omega`],
//! [`printed_zero_omega`] and [`printed_zero_multiplication`].

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::elliptic::{pair_model, ratio_from_params, sample_divisor_coord};
use super::{GroupoidChartModel, DEFAULT_COMPOSABLE_TOL};
use crate::divisor::{residue_model_frame, ResidueKind};
use crate::geometry::{
    cx, holomorphic_two_form_value, realify, two_form_value, FormField, FormKind, SmoothMap, ToleranceProfile,
};
use crate::rng::{uniform, uniform_vec, Rng};

pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type BivectorFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// Smallest stretch factor the sampler accepts for nonzero-residue arrows.
const MIN_STRETCH: f64 = 0.05;

#[derive(Clone)]
pub struct SymplecticModel {
    pub groupoid: GroupoidChartModel,
    /// `ω` on the base, defined off the divisor.
    pub omega_base: FormField,
    /// `Ω` on arrows.
    pub omega: FormField,
    /// Components `π^{ij}` of the Poisson bivector on the base.
    pub pi_bivector: BivectorFn,
    /// Distance of a base point from the divisor.
    pub divisor_distance: ScalarFn,
    pub residue: Option<ResidueKind>,
}

impl fmt::Debug for SymplecticModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymplecticModel({})", self.groupoid.name())
    }
}

impl SymplecticModel {
    /// `t*ω − s*ω` by numerical pullback, defined where both endpoints are
    /// off the divisor.
    pub fn pulled_back_difference(&self, prof: ToleranceProfile) -> FormField {
        let t = self.omega_base.pulled_back(&self.groupoid.target, prof);
        let s = self.omega_base.pulled_back(&self.groupoid.source, prof);
        t.sub(&s)
    }
}

/// `F = 1 + 2⟨x, c⟩ + |x|²|c|² = |s(g)|²/|x|²` for `g = (x, c)`.
pub(crate) fn stretch(g: &[f64]) -> f64 {
    let (x1, x2, a, b) = (g[0], g[1], g[2], g[3]);
    1.0 + 2.0 * (a * x1 + b * x2) + (x1 * x1 + x2 * x2) * (a * a + b * b)
}

/// `Ω = t*ω − s*ω` for `ω = dx₁∧dx₂/r²`:
///
/// `F·Ω = (a²+b²) dx₁∧dx₂ + 2bx₁ dx₁∧da − (2ax₁+1) dx₁∧db
///       + (2bx₂+1) dx₂∧da − 2ax₂ dx₂∧db − r² da∧db`.
pub fn nonzero_omega() -> FormField {
    FormField::new(2, 4, FormKind::Real, |g, v| {
        let (x1, x2, a, b) = (g[0], g[1], g[2], g[3]);
        let f = stretch(g);
        let r2 = x1 * x1 + x2 * x2;
        let c = |x: f64| Complex64::new(x / f, 0.0);
        two_form_value(
            &[
                (0, 1, c(a * a + b * b)),
                (0, 2, c(2.0 * b * x1)),
                (0, 3, c(-(2.0 * a * x1 + 1.0))),
                (1, 2, c(2.0 * b * x2 + 1.0)),
                (1, 3, c(-2.0 * a * x2)),
                (2, 3, c(-r2)),
            ],
            v[0],
            v[1],
        )
    })
    .with_domain(|g| stretch(g) > 0.0)
}

/// The form as printed alongside the nonzero-residue model. It is not
/// `t*ω − s*ω` and degenerates where `2ax₁ + 2bx₂ + 1 = 0`.
pub fn printed_nonzero_omega() -> FormField {
    FormField::new(2, 4, FormKind::Real, |g, v| {
        let (x1, x2, a, b) = (g[0], g[1], g[2], g[3]);
        let f = stretch(g);
        let r2 = x1 * x1 + x2 * x2;
        let c = |x: f64| Complex64::new(x / f, 0.0);
        two_form_value(
            &[
                (0, 1, c((a * a + b * b) * r2)),
                (0, 2, c(-2.0 * b * x1)),
                (0, 3, c(2.0 * a * x1 + 1.0)),
                (1, 2, c(-(2.0 * b * x2 + 1.0))),
                (1, 3, c(2.0 * a * x2)),
            ],
            v[0],
            v[1],
        )
    })
    .with_domain(|g| stretch(g) > 0.0)
}

fn nonzero_groupoid() -> GroupoidChartModel {
    let valid = |g: &[f64]| stretch(g) > 0.0;
    let source = SmoothMap::new(4, 2, |g| {
        let r2 = g[0] * g[0] + g[1] * g[1];
        vec![g[0] + r2 * g[2], g[1] + r2 * g[3]]
    })
    .with_domain(valid);
    let target = SmoothMap::new(4, 2, |g| vec![g[0], g[1]]).with_domain(valid);
    // swap conjugated through the blow-up: c ↦ −c/F, which is −c at x = 0
    let inverse = SmoothMap::new(4, 4, |g| {
        let r2 = g[0] * g[0] + g[1] * g[1];
        let f = stretch(g);
        vec![g[0] + r2 * g[2], g[1] + r2 * g[3], -g[2] / f, -g[3] / f]
    })
    .with_domain(valid);
    let unit = SmoothMap::new(2, 4, |p| vec![p[0], p[1], 0.0, 0.0]);
    // Conjugating pair composition through the blow-up gives
    // c = c₁ + F(g)·c₂; at x = 0 this is c₁ + c₂.
    let multiply = |g: &[f64], h: &[f64]| {
        let f = stretch(g);
        vec![g[0], g[1], g[2] + f * h[2], g[3] + f * h[3]]
    };
    let lift = |p: &[f64], free: &[f64]| {
        let g = vec![p[0], p[1], free[0], free[1]];
        (stretch(&g) >= MIN_STRETCH).then_some(g)
    };
    let sampler = |rng: &mut Rng| {
        let z = sample_divisor_coord(rng);
        vec![z.re, z.im]
    };
    let frame = |p: &[f64]| residue_model_frame(ResidueKind::Nonzero, p).unwrap_or_default();
    GroupoidChartModel {
        name: "sympl-nonzero".into(),
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

/// Elliptic Poisson structure `π = (r²/f)∂x∧∂y` on ℝ² and its symplectic
/// groupoid. With `f = None` (`f ≡ 1`) `Ω` is the closed form
/// [`nonzero_omega`]; otherwise `Ω` is the numerical `t*ω − s*ω`, which is
/// only defined on the dense chart.
pub fn symplectic_nonzero_residue_model(f: Option<ScalarFn>) -> SymplecticModel {
    let groupoid = nonzero_groupoid();
    let f: ScalarFn = f.unwrap_or_else(|| Arc::new(|_: &[f64]| 1.0));
    let fb = f.clone();
    let omega_base = FormField::new(2, 2, FormKind::Real, move |p, v| {
        let r2 = p[0] * p[0] + p[1] * p[1];
        Complex64::new(fb(p) * (v[0][0] * v[1][1] - v[0][1] * v[1][0]) / r2, 0.0)
    })
    .with_domain(|p| p[0] != 0.0 || p[1] != 0.0);
    let fp = f.clone();
    let pi_bivector: BivectorFn = Arc::new(move |p: &[f64]| {
        let c = (p[0] * p[0] + p[1] * p[1]) / fp(p);
        DMatrix::from_row_slice(2, 2, &[0.0, c, -c, 0.0])
    });
    let constant_f = (0..8).all(|i| {
        let t = i as f64 * PI / 4.0;
        f(&[0.7 * t.cos(), 0.7 * t.sin()]) == 1.0
    }) && f(&[0.0, 0.0]) == 1.0;
    let mut model = SymplecticModel {
        groupoid,
        omega_base,
        omega: nonzero_omega(),
        pi_bivector,
        divisor_distance: Arc::new(|p: &[f64]| (p[0] * p[0] + p[1] * p[1]).sqrt()),
        residue: Some(ResidueKind::Nonzero),
    };
    if !constant_f {
        model.omega = model.pulled_back_difference(ToleranceProfile::default());
    }
    model
}

/// `Ω = t*ω − s*ω` for `ω = d log w ∧ dz`, in complex coordinates
/// `(z, a, b, c)`:
///
/// `Ω = (c/b) da∧db − da∧dc − (1/b) db∧dz − (a/b) db∧dc`.
pub fn zero_omega() -> FormField {
    FormField::new(2, 8, FormKind::Complex, |g, v| {
        let (a, b, c) = (cx(g, 2), cx(g, 4), cx(g, 6));
        let one = Complex64::new(1.0, 0.0);
        holomorphic_two_form_value(&[(1, 2, c / b), (1, 3, -one), (0, 2, one / b), (2, 3, -a / b)], v[0], v[1])
    })
    .with_domain(|g| g[4] != 0.0 || g[5] != 0.0)
}

/// The form as printed alongside the zero-residue model: the `db∧dc`
/// coefficient has the opposite sign, and the form is not closed.
pub fn printed_zero_omega() -> FormField {
    FormField::new(2, 8, FormKind::Complex, |g, v| {
        let (a, b, c) = (cx(g, 2), cx(g, 4), cx(g, 6));
        let one = Complex64::new(1.0, 0.0);
        holomorphic_two_form_value(&[(1, 2, c / b), (1, 3, -one), (0, 2, one / b), (2, 3, a / b)], v[0], v[1])
    })
    .with_domain(|g| g[4] != 0.0 || g[5] != 0.0)
}

fn zero_valid(g: &[f64]) -> bool {
    g[4] != 0.0 || g[5] != 0.0
}

fn zero_groupoid() -> GroupoidChartModel {
    let source = SmoothMap::new(8, 4, |g| {
        let (z, a, b, c) = (cx(g, 0), cx(g, 2), cx(g, 4), cx(g, 6));
        realify(&[a * b, a * c + z])
    })
    .with_domain(zero_valid);
    let target = SmoothMap::new(8, 4, |g| vec![g[2], g[3], g[0], g[1]]).with_domain(zero_valid);
    let inverse = SmoothMap::new(8, 8, |g| {
        let (z, a, b, c) = (cx(g, 0), cx(g, 2), cx(g, 4), cx(g, 6));
        realify(&[a * c + z, a * b, b.inv(), -c / b])
    })
    .with_domain(zero_valid);
    let unit = SmoothMap::new(4, 8, |p| vec![p[2], p[3], p[0], p[1], 1.0, 0.0, 0.0, 0.0]);
    let multiply = |g: &[f64], h: &[f64]| {
        let (z, a, b, c) = (cx(g, 0), cx(g, 2), cx(g, 4), cx(g, 6));
        let (b2, c2) = (cx(h, 4), cx(h, 6));
        realify(&[z, a, b * b2, c + b * c2])
    };
    let lift = |p: &[f64], free: &[f64]| {
        let b = ratio_from_params(free[0], free[1]);
        Some(vec![p[2], p[3], p[0], p[1], b.re, b.im, free[2], free[3]])
    };
    let sampler = |rng: &mut Rng| {
        let w = sample_divisor_coord(rng);
        let z = uniform_vec(rng, 2, -1.0, 1.0);
        vec![w.re, w.im, z[0], z[1]]
    };
    let frame = |p: &[f64]| residue_model_frame(ResidueKind::Zero, p).unwrap_or_default();
    GroupoidChartModel {
        name: "sympl-zero".into(),
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

/// The nonzero-residue groupoid with the printed inverse `(s(g), −a, −b)`.
/// It agrees with the true inverse only over the origin.
pub fn printed_nonzero_inverse(model: &GroupoidChartModel) -> GroupoidChartModel {
    let mut m = model.clone();
    m.name = "sympl-nonzero[printed inverse]".into();
    m.inverse = SmoothMap::new(4, 4, |g| {
        let r2 = g[0] * g[0] + g[1] * g[1];
        vec![g[0] + r2 * g[2], g[1] + r2 * g[3], -g[2], -g[3]]
    })
    .with_domain(|g| stretch(g) > 0.0);
    m
}

/// The zero-residue groupoid with the printed last component `c + b′c`.
pub fn printed_zero_multiplication(model: &GroupoidChartModel) -> GroupoidChartModel {
    model.with_multiplication("sympl-zero[printed c+b'c]", |g, h| {
        let (z, a, b, c) = (cx(g, 0), cx(g, 2), cx(g, 4), cx(g, 6));
        let b2 = cx(h, 4);
        realify(&[z, a, b * b2, c + b2 * c])
    })
}

/// Zero-residue elliptic Poisson structure on ℂ² = ℝ⁴ with divisor
/// `{w = 0}`, coordinates `(w, z)`.
pub fn symplectic_zero_residue_model() -> SymplecticModel {
    let omega_base = FormField::new(2, 4, FormKind::Complex, |p, v| {
        let w = cx(p, 0);
        let (dw1, dz1) = (cx(v[0], 0), cx(v[0], 2));
        let (dw2, dz2) = (cx(v[1], 0), cx(v[1], 2));
        (dw1 * dz2 - dw2 * dz1) / w
    })
    .with_domain(|p| p[0] != 0.0 || p[1] != 0.0);
    // π = r∂r∧∂x₃ + ∂θ∧∂x₄
    let pi_bivector: BivectorFn = Arc::new(|p: &[f64]| {
        let (x1, x2) = (p[0], p[1]);
        let mut m = DMatrix::zeros(4, 4);
        for (i, j, v) in [(0, 2, x1), (1, 2, x2), (1, 3, x1), (0, 3, -x2)] {
            m[(i, j)] = v;
            m[(j, i)] = -v;
        }
        m
    });
    SymplecticModel {
        groupoid: zero_groupoid(),
        omega_base,
        omega: zero_omega(),
        pi_bivector,
        divisor_distance: Arc::new(|p: &[f64]| (p[0] * p[0] + p[1] * p[1]).sqrt()),
        residue: Some(ResidueKind::Zero),
    }
}

/// Pair groupoid of ℝ² with `ω = dx∧dy` and `Ω = t*ω − s*ω`.
pub fn pair_area_model() -> SymplecticModel {
    let groupoid = pair_model(2).expect("pair groupoid of the plane");
    let omega_base = FormField::new(2, 2, FormKind::Real, |_, v| {
        Complex64::new(v[0][0] * v[1][1] - v[0][1] * v[1][0], 0.0)
    });
    let omega = FormField::new(2, 4, FormKind::Real, |_, v| {
        let one = Complex64::new(1.0, 0.0);
        two_form_value(&[(0, 1, one), (2, 3, -one)], v[0], v[1])
    });
    SymplecticModel {
        groupoid,
        omega_base,
        omega,
        pi_bivector: Arc::new(|_: &[f64]| DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])),
        divisor_distance: Arc::new(|_: &[f64]| f64::INFINITY),
        residue: None,
    }
}

/// A point of the nonzero-residue arrow space at distance at least `margin`
/// from the origin fibre, with source also `margin` away from the origin.
pub fn sample_dense_nonzero(rng: &mut Rng, margin: f64) -> Vec<f64> {
    loop {
        let r = uniform(rng, margin, 1.2);
        let th = uniform(rng, -PI, PI);
        let g = vec![r * th.cos(), r * th.sin(), uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)];
        if stretch(&g) * r * r >= margin * margin {
            return g;
        }
    }
}
