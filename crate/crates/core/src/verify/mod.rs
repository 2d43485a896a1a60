//! Sampled checks of the groupoid models against their stated properties.
//!
//! Every check returns a [`CheckReport`] carrying the seed, the tolerance
//! profile and at most [`MAX_WITNESSES`] failing samples.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{GeometryError, ToleranceProfile};
use crate::groupoid::ModelError;

pub mod algebroid;
pub mod apath;
pub mod axioms;
pub mod forms;
pub mod morphism;

pub use algebroid::{check_algebroid, lie_algebroid_of};
pub use apath::{apath_rescale, check_apath, APath, Curve};
pub use axioms::{check_groupoid_axioms, check_negative_control, AXIOM_NAMES};
pub use forms::{
    check_closed, check_multiplicative, check_nondegenerate, check_omega_pullback, check_poisson, jacobiator_residual,
};
pub use morphism::{
    check_errata, check_morphism, resolve_psi_convention, ConventionOutcome, ConventionResolution, MorphismCase,
};

pub const MAX_WITNESSES: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("{model}: sampler could not produce the requested samples")]
    SamplerExhausted { model: String },
    #[error("radius must be positive along the curve, got {r} at τ = {tau}")]
    DegenerateRadius { tau: f64, r: f64 },
    #[error("check `{check}` does not apply to model `{model}`")]
    NotApplicable { check: String, model: String },
    #[error("invalid check configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

impl VerifyError {
    fn from_sampling(e: ModelError) -> VerifyError {
        match e {
            ModelError::SamplerExhausted { model } => VerifyError::SamplerExhausted { model },
            other => VerifyError::Model(other),
        }
    }
}

/// How sample residuals are compared with the tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    /// Every residual below the tolerance.
    AllBelow,
    /// Every residual above the tolerance.
    AllAbove,
    /// At least one residual above the tolerance; used for expected failures.
    MaxAbove,
    /// Exactly one candidate below the tolerance.
    ExactlyOneBelow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub label: String,
    pub inputs: Vec<Vec<f64>>,
    /// Non-finite residuals are stored as `f64::MAX`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub model: String,
    pub criterion: Criterion,
    pub samples_attempted: usize,
    pub samples_passed: usize,
    pub max_residual: f64,
    pub min_residual: f64,
    pub tolerance: f64,
    pub profile: ToleranceProfile,
    pub seed: u64,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn summary(&self) -> String {
        let cmp = match self.criterion {
            Criterion::AllBelow => format!("max {:.3e} < {:.1e}", self.max_residual, self.tolerance),
            Criterion::AllAbove => format!("min {:.3e} > {:.1e}", self.min_residual, self.tolerance),
            Criterion::MaxAbove => format!("max {:.3e} > {:.1e}", self.max_residual, self.tolerance),
            Criterion::ExactlyOneBelow => format!("best {:.3e} < {:.1e}", self.max_residual, self.tolerance),
        };
        let unit = match self.criterion {
            Criterion::ExactlyOneBelow => "candidates",
            _ => "samples",
        };
        format!(
            "{} {} [{}]: {}/{} {unit}, {}",
            self.verdict, self.check, self.model, self.samples_passed, self.samples_attempted, cmp
        )
    }
}

fn finite_or_max(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else {
        f64::MAX
    }
}

/// Accumulates sample residuals into a [`CheckReport`].
pub(crate) struct Tally {
    check: String,
    model: String,
    criterion: Criterion,
    tolerance: f64,
    profile: ToleranceProfile,
    seed: u64,
    attempted: usize,
    passed: usize,
    max: f64,
    min: f64,
    witnesses: Vec<Witness>,
    below: Vec<Witness>,
    notes: Vec<String>,
}

impl Tally {
    pub(crate) fn new(check: &str, model: &str, criterion: Criterion, tolerance: f64, profile: &ToleranceProfile, seed: u64) -> Self {
        Tally {
            check: check.to_string(),
            model: model.to_string(),
            criterion,
            tolerance,
            profile: *profile,
            seed,
            attempted: 0,
            passed: 0,
            max: 0.0,
            min: f64::MAX,
            witnesses: Vec::new(),
            below: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Records one sample. `inputs` is only evaluated for failing samples.
    pub(crate) fn record<F>(&mut self, label: &str, residual: f64, inputs: F)
    where
        F: FnOnce() -> Vec<Vec<f64>>,
    {
        let r = finite_or_max(if residual.is_nan() { f64::INFINITY } else { residual });
        self.attempted += 1;
        self.max = self.max.max(r);
        self.min = self.min.min(r);
        let above = r > self.tolerance;
        let ok = match self.criterion {
            Criterion::AllBelow => r < self.tolerance,
            Criterion::AllAbove | Criterion::MaxAbove => above,
            Criterion::ExactlyOneBelow => r < self.tolerance,
        };
        if ok {
            self.passed += 1;
            return;
        }
        let w = || Witness { label: label.to_string(), inputs: inputs(), residual: r };
        match self.criterion {
            Criterion::MaxAbove => {
                if self.below.len() < MAX_WITNESSES {
                    self.below.push(w());
                }
            }
            _ => {
                if self.witnesses.len() < MAX_WITNESSES {
                    self.witnesses.push(w());
                }
            }
        }
    }

    pub(crate) fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub(crate) fn finish(mut self) -> CheckReport {
        let pass = match self.criterion {
            Criterion::AllBelow | Criterion::AllAbove => self.attempted > 0 && self.passed == self.attempted,
            Criterion::MaxAbove => self.passed > 0,
            Criterion::ExactlyOneBelow => self.passed == 1,
        };
        if self.criterion == Criterion::MaxAbove && !pass {
            self.witnesses = std::mem::take(&mut self.below);
        }
        if pass {
            self.witnesses.clear();
        }
        if !pass && self.witnesses.is_empty() {
            self.witnesses.push(Witness { label: "no samples".into(), inputs: Vec::new(), residual: 0.0 });
        }
        if self.attempted == 0 {
            self.min = 0.0;
        }
        CheckReport {
            check: self.check,
            model: self.model,
            criterion: self.criterion,
            samples_attempted: self.attempted,
            samples_passed: self.passed,
            max_residual: self.max,
            min_residual: self.min,
            tolerance: self.tolerance,
            profile: self.profile,
            seed: self.seed,
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
            witnesses: self.witnesses,
            notes: self.notes,
        }
    }
}

/// Check names understood by the command line, with descriptions.
pub fn check_catalogue() -> Vec<(&'static str, &'static str)> {
    vec![
        ("axioms", "seven groupoid identities on sampled composable triples"),
        ("algebroid", "dt(ker ds) at units against the expected frame"),
        ("omega", "Ω against t*ω − s*ω on the dense chart"),
        ("closed", "dΩ = 0 on sampled arrows"),
        ("nondegenerate", "|det Ω| on a fixed grid"),
        ("multiplicative", "m*Ω = pr₁*Ω + pr₂*Ω on composable pairs"),
        ("poisson", "Schouten bracket [π, π] off the divisor"),
        ("morphism", "anchors, multiplication and forms under the model's morphisms"),
        ("psi", "the four conventions for ψ out of the ssc integration"),
        ("erratum", "printed formulas that the derived ones replace"),
        ("negative-control", "axioms on a multiplication perturbed by 1e-3"),
        ("apath", "rescaled A-paths converge to the divisor with fixed coefficients"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tally_semantics() {
        let prof = ToleranceProfile::default();
        let mut t = Tally::new("c", "m", Criterion::AllBelow, 1e-3, &prof, 1);
        t.record("a", 1e-5, Vec::new);
        let r = t.finish();
        assert!(r.passed() && r.witnesses.is_empty());

        let mut t = Tally::new("c", "m", Criterion::AllBelow, 1e-3, &prof, 1);
        t.record("a", 1e-5, Vec::new);
        t.record("b", f64::NAN, || vec![vec![1.0]]);
        let r = t.finish();
        assert!(!r.passed());
        assert_eq!(r.witnesses.len(), 1);
        assert_eq!(r.max_residual, f64::MAX);

        let mut t = Tally::new("c", "m", Criterion::MaxAbove, 1e-2, &prof, 1);
        t.record("a", 1e-5, Vec::new);
        t.record("b", 0.5, Vec::new);
        let r = t.finish();
        assert!(r.passed() && r.witnesses.is_empty());

        let mut t = Tally::new("c", "m", Criterion::MaxAbove, 1e-2, &prof, 1);
        t.record("a", 1e-5, Vec::new);
        assert!(!t.finish().witnesses.is_empty());
    }

    #[test]
    fn witnesses_are_capped() {
        let prof = ToleranceProfile::default();
        let mut t = Tally::new("c", "m", Criterion::AllBelow, 1e-3, &prof, 1);
        for _ in 0..100 {
            t.record("a", 1.0, Vec::new);
        }
        assert_eq!(t.finish().witnesses.len(), MAX_WITNESSES);
    }
}
