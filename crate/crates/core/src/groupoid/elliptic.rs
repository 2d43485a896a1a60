//! Elliptic groupoid charts: the smooth case, normal-crossing charts, the
//! pair groupoid, and the ℤ/2 quotient for non-coorientable divisors.
//!
//! Arrow coordinates are `(X, Y, a, b)`: `X`, `Y` the real coordinates of
//! target and source, `a ∈ ℂ^k` the divisor coordinates of the target and
//! `b ∈ (ℂ*)^k` the blow-up ratios, so that `s = (Y, a⊙b)` and `t = (X, a)`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{GroupoidChartModel, ModelError, DEFAULT_COMPOSABLE_TOL};
use crate::divisor::DivisorLocalModel;
use crate::geometry::{cx, SmoothMap};
use crate::rng::{chance, uniform, uniform_vec, Rng};

#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub(crate) n: usize,
    pub(crate) real: Vec<usize>,
    pub(crate) pairs: Vec<usize>,
}

impl Layout {
    pub(crate) fn new(model: &DivisorLocalModel) -> Self {
        Layout { n: model.dim(), real: model.real_coords().to_vec(), pairs: model.pairs().to_vec() }
    }

    pub(crate) fn nr(&self) -> usize {
        self.real.len()
    }

    pub(crate) fn k(&self) -> usize {
        self.pairs.len()
    }

    pub(crate) fn reals(&self, p: &[f64]) -> Vec<f64> {
        self.real.iter().map(|&i| p[i]).collect()
    }

    pub(crate) fn complexes(&self, p: &[f64]) -> Vec<Complex64> {
        self.pairs.iter().map(|&i| cx(p, i)).collect()
    }

    pub(crate) fn assemble(&self, reals: &[f64], zs: &[Complex64]) -> Vec<f64> {
        let mut p = vec![0.0; self.n];
        for (&i, &x) in self.real.iter().zip(reals) {
            p[i] = x;
        }
        for (&i, z) in self.pairs.iter().zip(zs) {
            p[i] = z.re;
            p[i + 1] = z.im;
        }
        p
    }

    /// Real coordinates uniform in `[−1,1]`; each divisor coordinate is
    /// exactly zero with probability 1/4, else of modulus in `[0.2, 1.5]`.
    pub(crate) fn sample_base(&self, rng: &mut Rng) -> Vec<f64> {
        let reals = uniform_vec(rng, self.nr(), -1.0, 1.0);
        let zs: Vec<Complex64> = (0..self.k()).map(|_| sample_divisor_coord(rng)).collect();
        self.assemble(&reals, &zs)
    }
}

pub(crate) fn sample_divisor_coord(rng: &mut Rng) -> Complex64 {
    if chance(rng, 0.25) {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::from_polar(uniform(rng, 0.2, 1.5), uniform(rng, -PI, PI))
    }
}

/// Nonzero complex number of modulus in `[0.5, 2]` from two parameters in `[−1,1]`.
pub(crate) fn ratio_from_params(u: f64, w: f64) -> Complex64 {
    Complex64::from_polar(1.25 + 0.75 * u, 0.9 * PI * w)
}

fn nonzero(z: Complex64) -> bool {
    z.re != 0.0 || z.im != 0.0
}

struct ArrowView<'a> {
    x: &'a [f64],
    y: &'a [f64],
    a: Vec<Complex64>,
    b: Vec<Complex64>,
}

fn view<'a>(l: &Layout, g: &'a [f64]) -> ArrowView<'a> {
    let (nr, k) = (l.nr(), l.k());
    let a = (0..k).map(|j| cx(g, 2 * nr + 2 * j)).collect();
    let b = (0..k).map(|j| cx(g, 2 * nr + 2 * k + 2 * j)).collect();
    ArrowView { x: &g[..nr], y: &g[nr..2 * nr], a, b }
}

fn pack(x: &[f64], y: &[f64], a: &[Complex64], b: &[Complex64]) -> Vec<f64> {
    let mut g = Vec::with_capacity(x.len() + y.len() + 2 * a.len() + 2 * b.len());
    g.extend_from_slice(x);
    g.extend_from_slice(y);
    for z in a.iter().chain(b) {
        g.push(z.re);
        g.push(z.im);
    }
    g
}

/// Elliptic groupoid chart over `ℝⁿ` whose divisor factors start at the
/// given real indices. With no factors this is the pair groupoid.
pub fn elliptic_chart(name: &str, n: usize, pairs: Vec<usize>) -> Result<GroupoidChartModel, ModelError> {
    if n == 0 {
        return Err(ModelError::InvalidParameter("dimension must be positive".into()));
    }
    let divisor = DivisorLocalModel::with_pairs(n, pairs)?;
    let l = Arc::new(Layout::new(&divisor));
    let (nr, k) = (l.nr(), l.k());
    let arrow_dim = 2 * n;

    let valid = {
        let l = l.clone();
        move |g: &[f64]| view(&l, g).b.iter().all(|&b| nonzero(b))
    };
    let source = {
        let l = l.clone();
        SmoothMap::new(arrow_dim, n, move |g| {
            let v = view(&l, g);
            let s: Vec<Complex64> = v.a.iter().zip(&v.b).map(|(a, b)| a * b).collect();
            l.assemble(v.y, &s)
        })
        .with_domain(valid.clone())
    };
    let target = {
        let l = l.clone();
        SmoothMap::new(arrow_dim, n, move |g| {
            let v = view(&l, g);
            l.assemble(v.x, &v.a)
        })
        .with_domain(valid.clone())
    };
    let inverse = {
        let l = l.clone();
        SmoothMap::new(arrow_dim, arrow_dim, move |g| {
            let v = view(&l, g);
            let ab: Vec<Complex64> = v.a.iter().zip(&v.b).map(|(a, b)| a * b).collect();
            let binv: Vec<Complex64> = v.b.iter().map(|b| b.inv()).collect();
            pack(v.y, v.x, &ab, &binv)
        })
        .with_domain(valid.clone())
    };
    let unit = {
        let l = l.clone();
        SmoothMap::new(n, arrow_dim, move |p| {
            let x = l.reals(p);
            let ones = vec![Complex64::new(1.0, 0.0); l.k()];
            pack(&x, &x, &l.complexes(p), &ones)
        })
    };
    let multiply = {
        let l = l.clone();
        move |g: &[f64], h: &[f64]| {
            let (vg, vh) = (view(&l, g), view(&l, h));
            let b: Vec<Complex64> = vg.b.iter().zip(&vh.b).map(|(x, y)| x * y).collect();
            pack(vg.x, vh.y, &vg.a, &b)
        }
    };
    let lift = {
        let l = l.clone();
        move |p: &[f64], free: &[f64]| {
            let x = l.reals(p);
            let y = &free[..nr];
            let b: Vec<Complex64> = (0..k).map(|j| ratio_from_params(free[nr + 2 * j], free[nr + 2 * j + 1])).collect();
            Some(pack(&x, y, &l.complexes(p), &b))
        }
    };
    let between = {
        let l = l.clone();
        move |p: &[f64], q: &[f64], free: &[f64]| {
            let (zp, zq) = (l.complexes(p), l.complexes(q));
            let mut b = Vec::with_capacity(k);
            for j in 0..k {
                match (nonzero(zp[j]), nonzero(zq[j])) {
                    (true, true) => b.push(zq[j] / zp[j]),
                    (false, false) => b.push(ratio_from_params(free[2 * j], free[2 * j + 1])),
                    _ => return None,
                }
            }
            Some(pack(&l.reals(p), &l.reals(q), &zp, &b))
        }
    };
    let sampler = {
        let l = l.clone();
        move |rng: &mut Rng| l.sample_base(rng)
    };
    let frame = {
        let d = divisor.clone();
        move |p: &[f64]| d.algebroid_frame(p).unwrap_or_default()
    };
    Ok(GroupoidChartModel {
        name: name.to_string(),
        arrow_dim,
        base_dim: n,
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
        lift_free_dim: nr + 2 * k,
        base_sampler: Arc::new(sampler),
        divisor_pairs: l.pairs.clone(),
        between: Some(Arc::new(between)),
        between_free_dim: 2 * k,
        expected_algebroid: Some(Arc::new(frame)),
        elliptic_layout: Some((nr, k)),
    })
}

/// Smooth coorientable divisor `{z = 0}` in `ℝ^{n−2} × ℂ`.
pub fn case1_model(n: usize) -> Result<GroupoidChartModel, ModelError> {
    if n < 2 {
        return Err(ModelError::InvalidParameter(format!("case1 needs n ≥ 2, got {n}")));
    }
    elliptic_chart("case1", n, vec![n - 2])
}

/// Normal-crossing divisor `{z_1⋯z_k = 0}` in `ℝ^{n−2k} × ℂ^k`.
#[allow(non_snake_case)]
pub fn caseIV_model(n: usize, k: usize) -> Result<GroupoidChartModel, ModelError> {
    if k == 0 || 2 * k > n {
        return Err(ModelError::InvalidParameter(format!("caseIV needs n ≥ 2k ≥ 2, got n={n}, k={k}")));
    }
    elliptic_chart(&format!("caseIV:{k}"), n, (0..k).map(|j| n - 2 * k + 2 * j).collect())
}

pub fn pair_model(n: usize) -> Result<GroupoidChartModel, ModelError> {
    elliptic_chart("pair", n, Vec::new())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdealPullback {
    pub s_value: f64,
    pub t_value: f64,
    pub ratio: f64,
}

/// `s*` and `t*` of the ideal generator at `g`, and their ratio `∏|b_j|²`.
pub fn elliptic_ideal_pullback(model: &GroupoidChartModel, g: &[f64]) -> Result<IdealPullback, ModelError> {
    let Some((nr, k)) = model.elliptic_layout else {
        return Err(ModelError::InvalidParameter(format!("{} is not an elliptic chart", model.name)));
    };
    if !model.is_arrow(g) {
        return Err(ModelError::ChartInvalid { model: model.name.clone(), point: g.to_vec() });
    }
    let a: Vec<Complex64> = (0..k).map(|j| cx(g, 2 * nr + 2 * j)).collect();
    let b: Vec<Complex64> = (0..k).map(|j| cx(g, 2 * nr + 2 * k + 2 * j)).collect();
    let s_value = a.iter().zip(&b).map(|(a, b)| (a * b).norm_sqr()).product();
    let t_value = a.iter().map(|a| a.norm_sqr()).product();
    let ratio = b.iter().map(|b| b.norm_sqr()).product();
    Ok(IdealPullback { s_value, t_value, ratio })
}

fn conj_if(z: Complex64, flag: bool) -> Complex64 {
    if flag {
        z.conj()
    } else {
        z
    }
}

/// Non-coorientable divisor: the quotient of the coorientable double cover
/// by the deck involution, which conjugates the normal coordinate. Arrows
/// are case1 arrows with a trailing sheet coordinate `δ ∈ {0, 1}`:
///
/// `s = (Y, conj^δ(ab))`, `t = (X, a)`,
/// `m(g, h) = (X_g, Y_h, a_g, b_g·conj^{δ_g}(b_h), δ_g + δ_h)`.
pub fn case2_quotient_model(n: usize) -> Result<GroupoidChartModel, ModelError> {
    if n < 2 {
        return Err(ModelError::InvalidParameter(format!("case2 needs n ≥ 2, got {n}")));
    }
    let divisor = DivisorLocalModel::new(n, 1)?;
    let l = Arc::new(Layout::new(&divisor));
    let nr = l.nr();
    let arrow_dim = 2 * n + 1;
    let (ia, ib, id) = (2 * nr, 2 * nr + 2, 2 * nr + 4);

    let valid = move |g: &[f64]| nonzero(cx(g, ib)) && (g[id] == 0.0 || g[id] == 1.0);
    let flag = move |g: &[f64]| g[id] == 1.0;
    let pack2 = |x: &[f64], y: &[f64], a: Complex64, b: Complex64, d: bool| {
        let mut g = pack(x, y, &[a], &[b]);
        g.push(if d { 1.0 } else { 0.0 });
        g
    };

    let source = {
        let l = l.clone();
        SmoothMap::new(arrow_dim, n, move |g| {
            let s = conj_if(cx(g, ia) * cx(g, ib), flag(g));
            l.assemble(&g[nr..2 * nr], &[s])
        })
        .with_domain(valid)
    };
    let target = {
        let l = l.clone();
        SmoothMap::new(arrow_dim, n, move |g| l.assemble(&g[..nr], &[cx(g, ia)])).with_domain(valid)
    };
    let inverse = SmoothMap::new(arrow_dim, arrow_dim, move |g| {
        let d = flag(g);
        let (a, b) = (cx(g, ia), cx(g, ib));
        pack2(&g[nr..2 * nr], &g[..nr], conj_if(a * b, d), conj_if(b.inv(), d), d)
    })
    .with_domain(valid);
    let unit = {
        let l = l.clone();
        SmoothMap::new(n, arrow_dim, move |p| {
            let x = l.reals(p);
            pack2(&x, &x, l.complexes(p)[0], Complex64::new(1.0, 0.0), false)
        })
    };
    let multiply = move |g: &[f64], h: &[f64]| {
        let dg = flag(g);
        let b = cx(g, ib) * conj_if(cx(h, ib), dg);
        pack2(&g[..nr], &h[nr..2 * nr], cx(g, ia), b, dg ^ flag(h))
    };
    let lift = {
        let l = l.clone();
        move |p: &[f64], free: &[f64]| {
            let b = ratio_from_params(free[nr], free[nr + 1]);
            Some(pack2(&l.reals(p), &free[..nr], l.complexes(p)[0], b, free[nr + 2] > 0.0))
        }
    };
    let sampler = {
        let l = l.clone();
        move |rng: &mut Rng| l.sample_base(rng)
    };
    let frame = move |p: &[f64]| divisor.algebroid_frame(p).unwrap_or_default();
    Ok(GroupoidChartModel {
        name: "case2".into(),
        arrow_dim,
        base_dim: n,
        discrete_dims: 1,
        source,
        target,
        inverse,
        unit,
        multiply: Arc::new(multiply),
        composable_tol: DEFAULT_COMPOSABLE_TOL,
        hausdorff: true,
        constraint: None,
        lift: Arc::new(lift),
        lift_free_dim: nr + 3,
        base_sampler: Arc::new(sampler),
        divisor_pairs: l.pairs.clone(),
        between: None,
        between_free_dim: 0,
        expected_algebroid: Some(Arc::new(frame)),
        elliptic_layout: None,
    })
}
