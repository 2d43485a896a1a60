//! Checks on `Ω` and `π` of the symplectic models.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{CheckReport, Criterion, Tally, VerifyError};
use crate::geometry::{exterior_derivative, jacobian, FormField, GeometryError, SmoothMap, ToleranceProfile};
use crate::groupoid::symplectic::BivectorFn;
use crate::groupoid::{GroupoidChartModel, SymplecticModel};
use crate::rng::{stream, Rng};

/// Distance from the divisor required of both endpoints on the dense chart.
pub const DENSE_MARGIN: f64 = 0.2;
/// Closedness samples keep `d(s)/d(t)` within this factor, `d` the distance
/// to the divisor. Coefficients of `Ω` grow like `1/F` as an arrow stretches
/// and the central-difference error with them.
pub const MAX_STRETCH_RATIO: f64 = 3.0;
pub const OMEGA_TOL: f64 = 1e-7;
pub const CLOSED_TOL: f64 = 1e-6;
pub const NONDEGENERATE_MIN: f64 = 1e-6;
pub const MULTIPLICATIVE_TOL: f64 = 1e-6;
pub const POISSON_TOL: f64 = 1e-6;

const MAX_ATTEMPTS: usize = 10_000;

fn basis(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

/// `ω(v_i, v_j)` for all `i < j`, row-major.
fn pair_values(omega: &FormField, p: &[f64], vectors: &[Vec<f64>]) -> Result<Vec<Complex64>, GeometryError> {
    let mut out = Vec::with_capacity(vectors.len() * vectors.len().saturating_sub(1) / 2);
    for i in 0..vectors.len() {
        for j in i + 1..vectors.len() {
            out.push(omega.eval(p, &[&vectors[i], &vectors[j]])?);
        }
    }
    Ok(out)
}

/// `(f*ω)(e_i, e_j)` for all `i < j`, with one Jacobian.
fn pulled_pair_values(f: &SmoothMap, omega: &FormField, p: &[f64], prof: &ToleranceProfile) -> Result<Vec<Complex64>, GeometryError> {
    let jac = jacobian(f, p, prof)?;
    let q = f.eval(p)?;
    let cols: Vec<Vec<f64>> = (0..jac.ncols()).map(|j| jac.column(j).iter().cloned().collect()).collect();
    pair_values(omega, &q, &cols)
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn dense_arrow(sym: &SymplecticModel, rng: &mut Rng) -> Result<Vec<f64>, VerifyError> {
    sample_where(sym, rng, |dt, ds| dt >= DENSE_MARGIN && ds >= DENSE_MARGIN)
}

fn moderate_arrow(sym: &SymplecticModel, rng: &mut Rng) -> Result<Vec<f64>, VerifyError> {
    sample_where(sym, rng, |dt, ds| {
        dt >= DENSE_MARGIN
            && ds >= DENSE_MARGIN
            && (!(dt.is_finite() && ds.is_finite())
                || (ds / dt <= MAX_STRETCH_RATIO && dt / ds <= MAX_STRETCH_RATIO))
    })
}

fn sample_where<P>(sym: &SymplecticModel, rng: &mut Rng, keep: P) -> Result<Vec<f64>, VerifyError>
where
    P: Fn(f64, f64) -> bool,
{
    let m = &sym.groupoid;
    for _ in 0..MAX_ATTEMPTS {
        let g = m.sample_arrow(rng).map_err(VerifyError::from_sampling)?;
        let (t, s) = m.anchor_pair(&g)?;
        if keep((sym.divisor_distance)(&t), (sym.divisor_distance)(&s)) && sym.omega.contains(&g) {
            return Ok(g);
        }
    }
    Err(VerifyError::SamplerExhausted { model: m.name().into() })
}

/// `Ω` against `t*ω − s*ω` computed by numerical pullback, on arrows
/// whose endpoints are at least [`DENSE_MARGIN`] from the divisor.
pub fn check_omega_pullback(
    sym: &SymplecticModel,
    samples: usize,
    seed: u64,
    tol: f64,
    prof: &ToleranceProfile,
) -> Result<CheckReport, VerifyError> {
    let m = &sym.groupoid;
    let mut tally = Tally::new("omega", m.name(), Criterion::AllBelow, tol, prof, seed);
    let mut rng = stream(seed, &format!("omega/{}", m.name()));
    let d = m.arrow_dim();
    let e: Vec<Vec<f64>> = (0..d).map(|i| basis(d, i)).collect();
    for _ in 0..samples {
        let g = dense_arrow(sym, &mut rng)?;
        let res = (|| -> Result<f64, GeometryError> {
            let direct = pair_values(&sym.omega, &g, &e)?;
            let t = pulled_pair_values(&m.target, &sym.omega_base, &g, prof)?;
            let s = pulled_pair_values(&m.source, &sym.omega_base, &g, prof)?;
            let diff: Vec<Complex64> = t.iter().zip(&s).map(|(a, b)| a - b).collect();
            Ok(max_diff(&direct, &diff))
        })();
        match res {
            Ok(r) => tally.record("Ω − (t*ω − s*ω)", r, || vec![g.clone()]),
            Err(err) => tally.record(&err.to_string(), f64::INFINITY, || vec![g.clone()]),
        }
    }
    Ok(tally.finish())
}

/// `dΩ(e_i, e_j, e_k)` for all coordinate triples at dense arrows whose
/// endpoints sit within [`MAX_STRETCH_RATIO`] of each other in distance to
/// the divisor.
pub fn check_closed(
    sym: &SymplecticModel,
    samples: usize,
    seed: u64,
    tol: f64,
    prof: &ToleranceProfile,
) -> Result<CheckReport, VerifyError> {
    let m = &sym.groupoid;
    let mut tally = Tally::new("closed", m.name(), Criterion::AllBelow, tol, prof, seed);
    let mut rng = stream(seed, &format!("closed/{}", m.name()));
    let d = m.arrow_dim();
    let e: Vec<Vec<f64>> = (0..d).map(|i| basis(d, i)).collect();
    for _ in 0..samples {
        let g = moderate_arrow(sym, &mut rng)?;
        let mut worst = 0.0f64;
        let mut failure = None;
        'outer: for i in 0..d {
            for j in i + 1..d {
                for k in j + 1..d {
                    match exterior_derivative(&sym.omega, &g, &[&e[i], &e[j], &e[k]], prof) {
                        Ok(v) => worst = worst.max(v.norm()),
                        Err(err) => {
                            failure = Some(err.to_string());
                            break 'outer;
                        }
                    }
                }
            }
        }
        match failure {
            None => tally.record("dΩ", worst, || vec![g.clone()]),
            Some(msg) => tally.record(&msg, f64::INFINITY, || vec![g.clone()]),
        }
    }
    Ok(tally.finish())
}

/// The fixed grid `{−0.6, 0, 0.7}^d`, restricted to arrows where `Ω` is defined.
fn nondegeneracy_grid(sym: &SymplecticModel) -> Vec<Vec<f64>> {
    const VALUES: [f64; 3] = [-0.6, 0.0, 0.7];
    let d = sym.groupoid.arrow_dim();
    let mut out = Vec::new();
    for idx in 0..VALUES.len().pow(d as u32) {
        let mut rest = idx;
        let g: Vec<f64> = (0..d)
            .map(|_| {
                let v = VALUES[rest % VALUES.len()];
                rest /= VALUES.len();
                v
            })
            .collect();
        if sym.groupoid.is_arrow(&g) && sym.omega.contains(&g) {
            out.push(g);
        }
    }
    out
}

/// `|det|` of the matrix of `Re Ω` on the fixed grid. For a holomorphic
/// form the real part is nondegenerate exactly when the form is.
pub fn check_nondegenerate(sym: &SymplecticModel, min_det: f64, prof: &ToleranceProfile) -> Result<CheckReport, VerifyError> {
    let m = &sym.groupoid;
    let mut tally = Tally::new("nondegenerate", m.name(), Criterion::AllAbove, min_det, prof, 0);
    let d = m.arrow_dim();
    let e: Vec<Vec<f64>> = (0..d).map(|i| basis(d, i)).collect();
    let grid = nondegeneracy_grid(sym);
    for g in &grid {
        let mut mat = DMatrix::zeros(d, d);
        let mut failed = None;
        for i in 0..d {
            for j in i + 1..d {
                match sym.omega.eval(g, &[&e[i], &e[j]]) {
                    Ok(v) => {
                        mat[(i, j)] = v.re;
                        mat[(j, i)] = -v.re;
                    }
                    Err(err) => failed = Some(err.to_string()),
                }
            }
        }
        match failed {
            None => tally.record("|det Re Ω|", mat.determinant().abs(), || vec![g.clone()]),
            Some(msg) => tally.record(&msg, 0.0, || vec![g.clone()]),
        }
    }
    tally.note(format!("grid {{-0.6, 0, 0.7}}^{d}: {} points in the domain", grid.len()));
    Ok(tally.finish())
}

/// Composable pairs parametrized by `θ = (g, free) ↦ (g, lift(s(g), free))`;
/// tangent vectors are the images of the coordinate directions of `θ`.
struct PairChart {
    first: SmoothMap,
    second: SmoothMap,
    product: SmoothMap,
}

fn pair_chart(m: &GroupoidChartModel) -> PairChart {
    let d = m.arrow_dim();
    let dim = d + m.lift_free_dim();
    let second_of = {
        let m = m.clone();
        move |th: &[f64]| -> Option<Vec<f64>> {
            let s = m.s(&th[..d]).ok()?;
            m.lift(&s, &th[d..]).ok()
        }
    };
    let first = SmoothMap::new(dim, d, move |th| th[..d].to_vec());
    let second = {
        let f = second_of.clone();
        SmoothMap::new(dim, d, move |th| f(th).unwrap_or_else(|| vec![f64::NAN; d]))
    };
    let product = {
        let f = second_of.clone();
        let m = m.clone();
        SmoothMap::new(dim, d, move |th| {
            f(th).and_then(|h| m.m(&th[..d], &h).ok()).unwrap_or_else(|| vec![f64::NAN; d])
        })
    };
    let ok = {
        let f = second_of;
        let m = m.clone();
        move |th: &[f64]| f(th).map(|h| m.m(&th[..d], &h).is_ok()).unwrap_or(false)
    };
    PairChart {
        first: first.with_domain(ok.clone()),
        second: second.with_domain(ok.clone()),
        product: product.with_domain(ok),
    }
}

/// `m*Ω − pr₁*Ω − pr₂*Ω` on the composable-pair chart.
pub fn check_multiplicative(
    sym: &SymplecticModel,
    samples: usize,
    seed: u64,
    tol: f64,
    prof: &ToleranceProfile,
) -> Result<CheckReport, VerifyError> {
    let m = &sym.groupoid;
    let mut tally = Tally::new("multiplicative", m.name(), Criterion::AllBelow, tol, prof, seed);
    let mut rng = stream(seed, &format!("multiplicative/{}", m.name()));
    let chart = pair_chart(m);
    let mut skipped = 0usize;
    for _ in 0..samples {
        let mut result = None;
        for _ in 0..MAX_ATTEMPTS {
            let g = m.sample_arrow(&mut rng).map_err(VerifyError::from_sampling)?;
            let mut th = g;
            th.extend(m.sample_free(&mut rng));
            let vals = (|| -> Result<f64, GeometryError> {
                let mul = pulled_pair_values(&chart.product, &sym.omega, &th, prof)?;
                let p1 = pulled_pair_values(&chart.first, &sym.omega, &th, prof)?;
                let p2 = pulled_pair_values(&chart.second, &sym.omega, &th, prof)?;
                let sum: Vec<Complex64> = p1.iter().zip(&p2).map(|(a, b)| a + b).collect();
                Ok(max_diff(&mul, &sum))
            })();
            match vals {
                Ok(r) => {
                    result = Some((th, r));
                    break;
                }
                Err(GeometryError::OutsideDomain { .. }) | Err(GeometryError::StencilOutsideDomain { .. }) => skipped += 1,
                Err(err) => {
                    result = Some((th, f64::INFINITY));
                    tally.note(err.to_string());
                    break;
                }
            }
        }
        let Some((th, r)) = result else {
            return Err(VerifyError::SamplerExhausted { model: m.name().into() });
        };
        tally.record("m*Ω − pr₁*Ω − pr₂*Ω", r, || vec![th.clone()]);
    }
    if skipped > 0 {
        tally.note(format!("{skipped} parameter samples too close to the chart boundary were redrawn"));
    }
    Ok(tally.finish())
}

/// `max |[π, π]^{ijk}|` at `p`, with `[π,π]^{ijk} = Σ_l π^{li}∂_lπ^{jk} + cyclic`
/// and central differences for `∂_l`.
pub fn jacobiator_residual(pi: &BivectorFn, p: &[f64], prof: &ToleranceProfile) -> f64 {
    let n = p.len();
    let at = pi(p);
    let mut deriv: Vec<DMatrix<f64>> = Vec::with_capacity(n);
    let mut q = p.to_vec();
    for l in 0..n {
        q[l] = p[l] + prof.h;
        let plus = pi(&q);
        q[l] = p[l] - prof.h;
        let minus = pi(&q);
        q[l] = p[l];
        deriv.push((plus - minus) / (2.0 * prof.h));
    }
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let mut s = 0.0;
                for (l, dl) in deriv.iter().enumerate() {
                    s += at[(l, i)] * dl[(j, k)] + at[(l, j)] * dl[(k, i)] + at[(l, k)] * dl[(i, j)];
                }
                worst = worst.max(s.abs());
            }
        }
    }
    worst
}

/// `π = ∂₁∧∂₂ + x₂∂₂∧∂₃` on ℝ³, whose Jacobiator is `−1` everywhere.
pub fn non_poisson_control() -> BivectorFn {
    std::sync::Arc::new(|p: &[f64]| {
        let mut m = DMatrix::zeros(3, 3);
        m[(0, 1)] = 1.0;
        m[(1, 0)] = -1.0;
        m[(1, 2)] = p[1];
        m[(2, 1)] = -p[1];
        m
    })
}

/// Jacobi identity for `π` at base points off the divisor.
pub fn check_poisson(
    sym: &SymplecticModel,
    samples: usize,
    seed: u64,
    tol: f64,
    prof: &ToleranceProfile,
) -> Result<CheckReport, VerifyError> {
    let m = &sym.groupoid;
    let mut tally = Tally::new("poisson", m.name(), Criterion::AllBelow, tol, prof, seed);
    let mut rng = stream(seed, &format!("poisson/{}", m.name()));
    for _ in 0..samples {
        let mut p = m.sample_base(&mut rng);
        let mut tries = 0;
        while (sym.divisor_distance)(&p) < DENSE_MARGIN && tries < MAX_ATTEMPTS {
            p = m.sample_base(&mut rng);
            tries += 1;
        }
        let r = jacobiator_residual(&sym.pi_bivector, &p, prof);
        tally.record("[π, π]", r, || vec![p.clone()]);
    }
    let control = jacobiator_residual(&non_poisson_control(), &[0.3, -0.2, 0.5], prof);
    tally.note(format!("control ∂₁∧∂₂ + x₂∂₂∧∂₃ on ℝ³: |[π, π]| = {control:.3e}"));
    Ok(tally.finish())
}

/// Matrix of `Re ω(e_i, e_j)` at `p`.
pub fn form_matrix(omega: &FormField, p: &[f64]) -> Result<DMatrix<f64>, GeometryError> {
    let d = omega.dim();
    let mut mat = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in i + 1..d {
            let v = omega.eval(p, &[&basis(d, i), &basis(d, j)])?.re;
            mat[(i, j)] = v;
            mat[(j, i)] = -v;
        }
    }
    Ok(mat)
}
