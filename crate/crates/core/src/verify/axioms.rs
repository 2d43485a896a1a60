//! The seven structure-map identities on sampled composable triples.

use super::{CheckReport, Criterion, Tally, VerifyError};
use crate::geometry::{sup_distance, ToleranceProfile};
use crate::groupoid::{GroupoidChartModel, ModelError};
use crate::rng::stream;

pub const AXIOM_NAMES: [&str; 7] = [
    "s(gh) = s(h)",
    "t(gh) = t(g)",
    "(gh)k = g(hk)",
    "u(t(g))g = g",
    "g u(s(g)) = g",
    "g g⁻¹ = u(t(g))",
    "g⁻¹ g = u(s(g))",
];

/// Residuals of the seven identities, in [`AXIOM_NAMES`] order. Each
/// identity is evaluated on its own; a composition refused for a gap counts
/// the gap as the residual, any other structure-map error as `Err`.
fn identities(m: &GroupoidChartModel, g: &[f64], h: &[f64], k: &[f64]) -> [Result<f64, ModelError>; 7] {
    let each: [&dyn Fn() -> Result<f64, ModelError>; 7] = [
        &|| Ok(sup_distance(&m.s(&m.m(g, h)?)?, &m.s(h)?)),
        &|| Ok(sup_distance(&m.t(&m.m(g, h)?)?, &m.t(g)?)),
        &|| Ok(sup_distance(&m.m(&m.m(g, h)?, k)?, &m.m(g, &m.m(h, k)?)?)),
        &|| Ok(sup_distance(&m.m(&m.unit_at(&m.t(g)?)?, g)?, g)),
        &|| Ok(sup_distance(&m.m(g, &m.unit_at(&m.s(g)?)?)?, g)),
        &|| Ok(sup_distance(&m.m(g, &m.inv(g)?)?, &m.unit_at(&m.t(g)?)?)),
        &|| Ok(sup_distance(&m.m(&m.inv(g)?, g)?, &m.unit_at(&m.s(g)?)?)),
    ];
    each.map(|f| match f() {
        Err(ModelError::NotComposable { gap, .. }) => Ok(gap),
        other => other,
    })
}

fn run(m: &GroupoidChartModel, samples: usize, seed: u64, tally: &mut Tally) -> Result<[f64; 7], VerifyError> {
    let mut rng = stream(seed, &format!("axioms/{}", m.name()));
    let mut worst = [0.0f64; 7];
    let mut errors = 0usize;
    for _ in 0..samples {
        let g = m.sample_arrow(&mut rng).map_err(VerifyError::from_sampling)?;
        let h = m.sample_composable(&g, &mut rng).map_err(VerifyError::from_sampling)?;
        let k = m.sample_composable(&h, &mut rng).map_err(VerifyError::from_sampling)?;
        let (mut arg, mut max, mut failed) = (0, 0.0f64, None);
        for (i, r) in identities(m, &g, &h, &k).into_iter().enumerate() {
            let x = match r {
                Ok(x) => x,
                Err(e) => {
                    failed.get_or_insert(e.to_string());
                    f64::INFINITY
                }
            };
            worst[i] = worst[i].max(x);
            if x > max || x.is_nan() {
                arg = i;
                max = x;
            }
        }
        if failed.is_some() {
            errors += 1;
        }
        let label = match (&failed, max.is_finite()) {
            (Some(e), false) => e.as_str(),
            _ => AXIOM_NAMES[arg],
        };
        tally.record(label, max, || vec![g.clone(), h.clone(), k.clone()]);
    }
    for (name, w) in AXIOM_NAMES.iter().zip(worst) {
        tally.note(format!("{name}: max {w:.3e}"));
    }
    if errors > 0 {
        tally.note(format!("{errors} samples raised structure-map errors"));
    }
    Ok(worst)
}

/// Samples `g`, then `h` with `t(h) = s(g)` and `k` with `t(k) = s(h)`, and
/// evaluates every identity; passes when all residuals are below
/// `prof.abs_tol`.
pub fn check_groupoid_axioms(
    m: &GroupoidChartModel,
    samples: usize,
    seed: u64,
    prof: &ToleranceProfile,
) -> Result<CheckReport, VerifyError> {
    let mut tally = Tally::new("axioms", m.name(), Criterion::AllBelow, prof.abs_tol, prof, seed);
    run(m, samples, seed, &mut tally)?;
    Ok(tally.finish())
}

/// Adds `1e-3` to the first output coordinate of the multiplication and
/// runs the same suite; passes when the suite detects the change.
pub fn check_negative_control(
    m: &GroupoidChartModel,
    samples: usize,
    seed: u64,
    prof: &ToleranceProfile,
) -> Result<CheckReport, VerifyError> {
    let perturbed = m.perturbed(0, 1e-3);
    let mut tally = Tally::new("negative-control", perturbed.name(), Criterion::MaxAbove, prof.abs_tol, prof, seed);
    run(&perturbed, samples, seed, &mut tally)?;
    Ok(tally.finish())
}
