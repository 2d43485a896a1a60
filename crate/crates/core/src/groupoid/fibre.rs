//! Strong fibre products `G₁ ×_{M×M} G₂` of groupoids over the same base.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::elliptic::{ratio_from_params, Layout};
use super::{GroupoidChartModel, ModelError};
use crate::divisor::DivisorLocalModel;
use crate::geometry::{jacobian, SmoothMap, ToleranceProfile};
use crate::rng::{stream, Rng};

const TRANSVERSALITY_SAMPLES: usize = 8;

/// Arrows are concatenations `(g₁, g₂)` with `(t, s)(g₁) = (t, s)(g₂)`.
///
/// Both factors must expose arrows between any two points of a common
/// orbit, so the product can be sampled. Transversality of the two maps
/// `(t, s)` is checked numerically at generic arrows and at arrows over the
/// deepest joint stratum.
pub fn fibre_product(m1: &GroupoidChartModel, m2: &GroupoidChartModel) -> Result<GroupoidChartModel, ModelError> {
    if m1.base_dim != m2.base_dim {
        return Err(ModelError::InvalidParameter(format!(
            "fibre product needs a common base, got dimensions {} and {}",
            m1.base_dim, m2.base_dim
        )));
    }
    if m1.discrete_dims != 0 || m2.discrete_dims != 0 {
        return Err(ModelError::InvalidParameter("fibre product factors must be smooth charts".into()));
    }
    let (Some(b1), Some(b2)) = (m1.between.clone(), m2.between.clone()) else {
        return Err(ModelError::InvalidParameter("fibre product factors must expose arrows between points".into()));
    };
    let n = m1.base_dim;
    let (d1, d2) = (m1.arrow_dim, m2.arrow_dim);
    let arrow_dim = d1 + d2;
    let mut union: Vec<usize> = m1.divisor_pairs.iter().chain(&m2.divisor_pairs).cloned().collect();
    union.sort_unstable();
    union.dedup();
    let divisor = DivisorLocalModel::with_pairs(n, union.clone())?;
    let layout = Arc::new(Layout::new(&divisor));

    let split = move |g: &[f64]| (g[..d1].to_vec(), g[d1..].to_vec());
    let (f1, f2) = (m1.clone(), m2.clone());
    let valid = move |g: &[f64]| g.len() == arrow_dim && f1.is_arrow(&g[..d1]) && f2.is_arrow(&g[d1..]);

    let lift_source = |f: SmoothMap| {
        SmoothMap::new(arrow_dim, n, move |g| f.eval(&g[..d1]).unwrap_or_else(|_| vec![f64::NAN; n])).with_domain(valid.clone())
    };
    let source = lift_source(m1.source.clone());
    let target = lift_source(m1.target.clone());
    let constraint = {
        let (s1, t1, s2, t2) = (m1.source.clone(), m1.target.clone(), m2.source.clone(), m2.target.clone());
        SmoothMap::new(arrow_dim, 2 * n, move |g| {
            let (g1, g2) = split(g);
            match (t1.eval(&g1), t2.eval(&g2), s1.eval(&g1), s2.eval(&g2)) {
                (Ok(a), Ok(b), Ok(c), Ok(d)) => {
                    a.iter().zip(&b).map(|(x, y)| x - y).chain(c.iter().zip(&d).map(|(x, y)| x - y)).collect()
                }
                _ => vec![f64::NAN; 2 * n],
            }
        })
        .with_domain(valid.clone())
    };
    let inverse = {
        let (i1, i2) = (m1.inverse.clone(), m2.inverse.clone());
        SmoothMap::new(arrow_dim, arrow_dim, move |g| {
            let (g1, g2) = split(g);
            match (i1.eval(&g1), i2.eval(&g2)) {
                (Ok(mut a), Ok(b)) => {
                    a.extend(b);
                    a
                }
                _ => vec![f64::NAN; arrow_dim],
            }
        })
        .with_domain(valid.clone())
    };
    let unit = {
        let (u1, u2) = (m1.unit.clone(), m2.unit.clone());
        let (c1, c2) = (m1.unit.clone(), m2.unit.clone());
        SmoothMap::new(n, arrow_dim, move |p| match (u1.eval(p), u2.eval(p)) {
            (Ok(mut a), Ok(b)) => {
                a.extend(b);
                a
            }
            _ => vec![f64::NAN; arrow_dim],
        })
        .with_domain(move |p| c1.contains(p) && c2.contains(p))
    };
    let multiply = {
        let (p1, p2) = (m1.multiply.clone(), m2.multiply.clone());
        move |g: &[f64], h: &[f64]| {
            let mut out = p1(&g[..d1], &h[..d1]);
            out.extend(p2(&g[d1..], &h[d1..]));
            out
        }
    };
    let (bf1, bf2) = (m1.between_free_dim, m2.between_free_dim);
    let nr = layout.nr();
    let k = layout.k();
    // A point in the joint orbit of p: same vanishing pattern on every
    // divisor factor of either model.
    let orbit_point = {
        let layout = layout.clone();
        move |p: &[f64], free: &[f64]| {
            let zs: Vec<Complex64> = layout
                .complexes(p)
                .iter()
                .enumerate()
                .map(|(j, z)| z * ratio_from_params(free[nr + 2 * j], free[nr + 2 * j + 1]))
                .collect();
            layout.assemble(&free[..nr], &zs)
        }
    };
    let between = {
        let (b1, b2) = (b1.clone(), b2.clone());
        move |p: &[f64], q: &[f64], free: &[f64]| {
            let mut g = b1(p, q, &free[..bf1])?;
            g.extend(b2(p, q, &free[bf1..bf1 + bf2])?);
            Some(g)
        }
    };
    let lift = {
        let between = between.clone();
        let orbit_point = orbit_point.clone();
        move |p: &[f64], free: &[f64]| {
            let q = orbit_point(p, &free[..nr + 2 * k]);
            between(p, &q, &free[nr + 2 * k..])
        }
    };
    let sampler = {
        let layout = layout.clone();
        move |rng: &mut Rng| layout.sample_base(rng)
    };
    let frame = move |p: &[f64]| divisor.algebroid_frame(p).unwrap_or_default();

    let product = GroupoidChartModel {
        name: format!("fibre:{},{}", m1.name, m2.name),
        arrow_dim,
        base_dim: n,
        discrete_dims: 0,
        source,
        target,
        inverse,
        unit,
        multiply: Arc::new(multiply),
        composable_tol: m1.composable_tol.max(m2.composable_tol),
        hausdorff: m1.hausdorff && m2.hausdorff,
        constraint: Some(constraint),
        lift: Arc::new(lift),
        lift_free_dim: nr + 2 * k + bf1 + bf2,
        base_sampler: Arc::new(sampler),
        divisor_pairs: union,
        between: Some(Arc::new(between)),
        between_free_dim: bf1 + bf2,
        expected_algebroid: Some(Arc::new(frame)),
        elliptic_layout: None,
    };
    check_transverse(m1, m2, &product, &layout)?;
    Ok(product)
}

fn anchor_jacobian(m: &GroupoidChartModel, g: &[f64], prof: &ToleranceProfile) -> Result<DMatrix<f64>, ModelError> {
    let jt = jacobian(&m.target, g, prof)?;
    let js = jacobian(&m.source, g, prof)?;
    let mut j = DMatrix::zeros(jt.nrows() + js.nrows(), jt.ncols());
    j.view_mut((0, 0), jt.shape()).copy_from(&jt);
    j.view_mut((jt.nrows(), 0), js.shape()).copy_from(&js);
    Ok(j)
}

fn numerical_rank(m: &DMatrix<f64>) -> usize {
    let s = m.clone().svd(false, false).singular_values;
    let smax = s.iter().cloned().fold(0.0, f64::max);
    s.iter().filter(|&&x| x > 1e-8 * smax.max(1.0)).count()
}

fn check_transverse(
    m1: &GroupoidChartModel,
    m2: &GroupoidChartModel,
    product: &GroupoidChartModel,
    layout: &Layout,
) -> Result<(), ModelError> {
    let prof = ToleranceProfile::default();
    let n = product.base_dim;
    let mut rng = stream(0, "fibre-product-transversality");
    let mut arrows = Vec::new();
    for i in 0..TRANSVERSALITY_SAMPLES {
        let mut p = product.sample_base(&mut rng);
        if i % 2 == 0 {
            // deepest joint stratum
            for &j in &layout.pairs {
                p[j] = 0.0;
                p[j + 1] = 0.0;
            }
        }
        let mut g = None;
        for _ in 0..64 {
            let mut free = product.sample_free(&mut rng);
            if i % 2 == 0 {
                // identical parameters in both factors, so equal factors give g₁ = g₂
                let (bf1, bf2) = (m1.between_free_dim, m2.between_free_dim);
                let off = layout.nr() + 2 * layout.k();
                for j in 0..bf1.min(bf2) {
                    free[off + bf1 + j] = free[off + j];
                }
            }
            if let Ok(a) = product.lift(&p, &free) {
                g = Some(a);
                break;
            }
        }
        arrows.push(g.ok_or_else(|| ModelError::SamplerExhausted { model: product.name.clone() })?);
    }
    for g in arrows {
        let (g1, g2) = g.split_at(m1.arrow_dim);
        let j1 = anchor_jacobian(m1, g1, &prof)?;
        let j2 = anchor_jacobian(m2, g2, &prof)?;
        let combined = DMatrix::from_fn(2 * n, j1.ncols() + j2.ncols(), |r, c| {
            if c < j1.ncols() {
                j1[(r, c)]
            } else {
                j2[(r, c - j1.ncols())]
            }
        });
        let rank = numerical_rank(&combined);
        if rank != 2 * n {
            return Err(ModelError::NotTransverse { rank, expected: 2 * n });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{case1_model, elliptic_chart, pair_model};
    use crate::geometry::sup_distance;

    #[test]
    fn product_with_the_pair_groupoid_is_the_factor() {
        let c = case1_model(4).unwrap();
        let f = fibre_product(&c, &pair_model(4).unwrap()).unwrap();
        let embed = |g: &[f64]| {
            let (t, s) = c.anchor_pair(g).unwrap();
            let mut out = g.to_vec();
            out.extend(t);
            out.extend(s);
            out
        };
        let mut rng = stream(2, "fibre-pair");
        for _ in 0..500 {
            let g = c.sample_arrow(&mut rng).unwrap();
            let h = c.sample_composable(&g, &mut rng).unwrap();
            let (eg, eh) = (embed(&g), embed(&h));
            assert!(f.is_arrow(&eg));
            assert_eq!(f.s(&eg).unwrap(), c.s(&g).unwrap());
            assert_eq!(f.t(&eg).unwrap(), c.t(&g).unwrap());
            assert!(sup_distance(&f.m(&eg, &eh).unwrap(), &embed(&c.m(&g, &h).unwrap())) < 1e-12);
            assert!(sup_distance(&f.inv(&eg).unwrap(), &embed(&c.inv(&g).unwrap())) < 1e-12);
        }
    }

    #[test]
    fn same_factor_twice_is_not_transverse() {
        let c = case1_model(4).unwrap();
        let err = fibre_product(&c, &c).unwrap_err();
        assert!(matches!(err, ModelError::NotTransverse { rank: 6, expected: 8 }));
    }

    #[test]
    fn distinct_factors_are_transverse() {
        let a = elliptic_chart("case1", 6, vec![4]).unwrap();
        let b = elliptic_chart("case1", 6, vec![2]).unwrap();
        let f = fibre_product(&a, &b).unwrap();
        assert_eq!(f.divisor_pairs(), &[2, 4]);
        assert!(f.is_hausdorff());
        let mut non_hausdorff = pair_model(6).unwrap();
        non_hausdorff.hausdorff = false;
        assert!(!fibre_product(&a, &non_hausdorff).unwrap().is_hausdorff());
    }
}
