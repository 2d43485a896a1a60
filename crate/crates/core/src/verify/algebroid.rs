//! The Lie algebroid of a chart model, read off as `dt(ker ds)` at units.

use nalgebra::{DMatrix, DVector};

use super::{CheckReport, Criterion, Tally, VerifyError};
use crate::geometry::{jacobian, largest_principal_angle, nullspace, orthonormal_basis, ToleranceProfile};
use crate::groupoid::GroupoidChartModel;
use crate::rng::stream;

/// Spanning set of `dt(ker ds)` at `unit(p)`. For models with a defining
/// constraint the kernel is taken inside the constraint's kernel.
pub fn lie_algebroid_of(m: &GroupoidChartModel, p: &[f64], prof: &ToleranceProfile) -> Result<Vec<DVector<f64>>, VerifyError> {
    let u = m.unit_at(p)?;
    let c = m.arrow_dim() - m.discrete_dims();
    let (source, target, constraint) = if m.discrete_dims() > 0 {
        m.continuous_slice(&u[c..])
    } else {
        (m.source_map().clone(), m.target_map().clone(), m.constraint().cloned())
    };
    let point = &u[..c];
    let js = jacobian(&source, point, prof)?;
    let stacked = match &constraint {
        Some(cm) => {
            let jc = jacobian(cm, point, prof)?;
            let mut all = DMatrix::zeros(jc.nrows() + js.nrows(), c);
            all.view_mut((0, 0), jc.shape()).copy_from(&jc);
            all.view_mut((jc.nrows(), 0), js.shape()).copy_from(&js);
            all
        }
        None => js,
    };
    let scale = stacked.norm().max(1.0);
    let kernel = nullspace(&stacked, 1e-8 * scale);
    let jt = jacobian(&target, point, prof)?;
    Ok(kernel.iter().map(|v| &jt * v).collect())
}

/// Largest principal angle between `dt(ker ds)` and the model's expected
/// frame at sampled base points; a rank mismatch counts as an infinite
/// residual.
pub fn check_algebroid(
    m: &GroupoidChartModel,
    samples: usize,
    seed: u64,
    prof: &ToleranceProfile,
) -> Result<CheckReport, VerifyError> {
    if !m.has_expected_algebroid() {
        return Err(VerifyError::NotApplicable { check: "algebroid".into(), model: m.name().into() });
    }
    let mut tally = Tally::new("algebroid", m.name(), Criterion::AllBelow, prof.subspace_tol, prof, seed);
    let mut rng = stream(seed, &format!("algebroid/{}", m.name()));
    let mut on_divisor = 0usize;
    for _ in 0..samples {
        let p = m.sample_base(&mut rng);
        let expected = m.expected_algebroid(&p).unwrap_or_default();
        let computed = match lie_algebroid_of(m, &p, prof) {
            Ok(c) => c,
            Err(e) => {
                tally.record(&e.to_string(), f64::INFINITY, || vec![p.clone()]);
                continue;
            }
        };
        let full = orthonormal_basis(&expected).ncols();
        if full < m.base_dim() {
            on_divisor += 1;
        }
        match largest_principal_angle(&computed, &expected) {
            Some(angle) => tally.record("principal angle", angle, || vec![p.clone()]),
            None => {
                let label = format!(
                    "rank {} against expected rank {}",
                    orthonormal_basis(&computed).ncols(),
                    full
                );
                tally.record(&label, f64::INFINITY, || vec![p.clone()]);
            }
        }
    }
    tally.note(format!("{on_divisor} of {samples} base points where the expected frame drops rank"));
    Ok(tally.finish())
}
