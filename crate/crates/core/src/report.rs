//! Run configuration, run reports, and the decision runners.
//!
//! A [`RunReport`] serializes to the same bytes for the same configuration,
//! seed and artifact version. Wall-clock timings are only recorded when
//! asked for, since they would break that.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::divisor::ResidueKind;
use crate::geometry::ToleranceProfile;
use crate::groupoid::symplectic::pair_area_model;
use crate::groupoid::{
    symplectic_nonzero_residue_model, symplectic_zero_residue_model, GroupoidChartModel, ModelError, ModelSpec,
    SymplecticModel,
};
use crate::rng::GENERATOR_ID;
use crate::topology::fixture::{load_decision_document, DecisionDocument, FixtureError};
use crate::topology::{double_cover_exists, hausdorff_nc_decision, hausdorff_smooth_decision, TopologyError};
use crate::verify::forms::{CLOSED_TOL, MULTIPLICATIVE_TOL, NONDEGENERATE_MIN, OMEGA_TOL, POISSON_TOL};
use crate::verify::morphism::{MORPHISM_TOL, PSI_TOL};
use crate::verify::{
    check_algebroid, check_apath, check_catalogue, check_closed, check_errata, check_groupoid_axioms, check_morphism,
    check_multiplicative, check_negative_control, check_nondegenerate, check_omega_pullback, check_poisson,
    resolve_psi_convention, CheckReport, MorphismCase, Verdict, VerifyError,
};
use crate::ARTIFACT_VERSION;

/// Samples per check when the configuration does not say otherwise.
pub fn default_samples(check: &str) -> usize {
    match check {
        "axioms" => 2000,
        "algebroid" | "poisson" => 100,
        _ => 200,
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown model `{0}`; see `list-models`")]
    UnknownModel(String),
    #[error("unknown check `{0}`; see `list-checks`")]
    UnknownCheck(String),
    #[error("seed must be a positive integer")]
    InvalidSeed,
    #[error("sample count for `{0}` must be positive")]
    InvalidSamples(String),
    #[error("invalid tolerance override: {0}")]
    InvalidTolerance(String),
    #[error("model `{name}`: {source}")]
    Model { name: String, source: ModelError },
    #[error("no models requested")]
    NoModels,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelRequest {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

impl ModelRequest {
    pub fn new(name: &str, dim: Option<usize>, k: Option<usize>) -> Self {
        ModelRequest { name: name.to_string(), dim, k }
    }

    fn spec(&self) -> Result<ModelSpec, ConfigError> {
        ModelSpec::parse(&self.name).map_err(|e| match e {
            ModelError::UnknownModel(n) => ConfigError::UnknownModel(n),
            other => ConfigError::Model { name: self.name.clone(), source: other },
        })
    }

    /// Dimension the model is actually built in.
    fn resolved_dim(&self, spec: &ModelSpec) -> usize {
        self.dim.unwrap_or_else(|| spec.default_dim(self.k))
    }
}

/// Partial [`ToleranceProfile`]; unset fields keep their defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ProfileOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fd_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspace_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curvature_budget: Option<f64>,
}

impl ProfileOverrides {
    /// `key=value` pairs separated by commas. A bare number sets `abs_tol`.
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        let mut o = ProfileOverrides::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part.split_once('=').unwrap_or(("abs_tol", part));
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| ConfigError::InvalidTolerance(format!("`{value}` is not a number")))?;
            let slot = match key.trim() {
                "fd_step" | "h" => &mut o.fd_step,
                "abs_tol" | "abs" => &mut o.abs_tol,
                "rel_tol" | "rel" => &mut o.rel_tol,
                "subspace_tol" | "subspace" => &mut o.subspace_tol,
                "curvature_budget" => &mut o.curvature_budget,
                other => return Err(ConfigError::InvalidTolerance(format!("unknown key `{other}`"))),
            };
            *slot = Some(v);
        }
        Ok(o)
    }

    pub fn apply(&self) -> Result<ToleranceProfile, ConfigError> {
        let d = ToleranceProfile::default();
        ToleranceProfile::new(
            self.fd_step.unwrap_or(d.h),
            self.abs_tol.unwrap_or(d.abs_tol),
            self.rel_tol.unwrap_or(d.rel_tol),
            self.subspace_tol.unwrap_or(d.subspace_tol),
            self.curvature_budget.unwrap_or(d.curvature_budget),
        )
        .map_err(|e| ConfigError::InvalidTolerance(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub models: Vec<ModelRequest>,
    /// Empty means every check that applies to each model.
    #[serde(default)]
    pub checks: Vec<String>,
    pub seed: u64,
    /// Per-check sample counts; checks not listed use `default_samples_all`
    /// or [`default_samples`].
    #[serde(default)]
    pub samples: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default_samples_all: Option<usize>,
    #[serde(default)]
    pub tolerances: ProfileOverrides,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub timings: bool,
}

impl RunConfig {
    pub fn new(models: Vec<ModelRequest>, checks: Vec<String>, seed: u64) -> Self {
        RunConfig {
            models,
            checks,
            seed,
            samples: BTreeMap::new(),
            default_samples_all: None,
            tolerances: ProfileOverrides::default(),
            out: None,
            format: OutputFormat::Json,
            timings: false,
        }
    }

    pub fn samples_for(&self, check: &str) -> usize {
        self.samples.get(check).copied().or(self.default_samples_all).unwrap_or_else(|| default_samples(check))
    }

    /// Checks names, counts and the profile, and builds every model, before
    /// anything is sampled.
    pub fn validate(&self) -> Result<(ToleranceProfile, Vec<(ModelSpec, GroupoidChartModel)>), ConfigError> {
        if self.seed == 0 {
            return Err(ConfigError::InvalidSeed);
        }
        if self.models.is_empty() {
            return Err(ConfigError::NoModels);
        }
        let known: Vec<&str> = check_catalogue().iter().map(|(n, _)| *n).collect();
        for c in self.checks.iter().chain(self.samples.keys()) {
            if !known.contains(&c.as_str()) {
                return Err(ConfigError::UnknownCheck(c.clone()));
            }
        }
        for (c, &n) in &self.samples {
            if n == 0 {
                return Err(ConfigError::InvalidSamples(c.clone()));
            }
        }
        if self.default_samples_all == Some(0) {
            return Err(ConfigError::InvalidSamples("all checks".into()));
        }
        let prof = self.tolerances.apply()?;
        let mut built = Vec::new();
        for req in &self.models {
            let spec = req.spec()?;
            let model = spec
                .build(req.dim, req.k)
                .map_err(|source| ConfigError::Model { name: req.name.clone(), source })?;
            built.push((spec, model));
        }
        Ok((prof, built))
    }

    fn checks_to_run(&self) -> Vec<String> {
        if self.checks.is_empty() {
            check_catalogue().iter().map(|(n, _)| n.to_string()).collect()
        } else {
            self.checks.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skipped {
    pub check: String,
    pub model: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunError {
    pub check: String,
    pub model: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub check: String,
    pub model: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecisionKind {
    Smooth,
    DoubleCover,
    NormalCrossing,
}

impl DecisionKind {
    pub fn parse(s: &str) -> Option<DecisionKind> {
        match s {
            "smooth" => Some(DecisionKind::Smooth),
            "double-cover" => Some(DecisionKind::DoubleCover),
            "normal-crossing" => Some(DecisionKind::NormalCrossing),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            DecisionKind::Smooth => "smooth",
            DecisionKind::DoubleCover => "double-cover",
            DecisionKind::NormalCrossing => "normal-crossing",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionResult {
    pub kind: DecisionKind,
    pub fixture: String,
    /// `hausdorff` for the two Hausdorff decisions, `exists` for the double cover.
    pub question: String,
    pub answer: bool,
    /// Kernel element (or kernel word) that blocks a positive answer.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<bool>,
    pub verdict: Verdict,
    pub details: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub artifact_version: String,
    pub generator: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<RunConfig>,
    #[serde(default)]
    pub reports: Vec<CheckReport>,
    #[serde(default)]
    pub decisions: Vec<DecisionResult>,
    #[serde(default)]
    pub skipped: Vec<Skipped>,
    #[serde(default)]
    pub errors: Vec<RunError>,
    #[serde(default)]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Vec<Timing>>,
    pub verdict: Verdict,
}

impl RunReport {
    fn empty(config: Option<RunConfig>) -> Self {
        RunReport {
            artifact_version: ARTIFACT_VERSION.to_string(),
            generator: GENERATOR_ID.to_string(),
            config,
            reports: Vec::new(),
            decisions: Vec::new(),
            skipped: Vec::new(),
            errors: Vec::new(),
            notes: Vec::new(),
            timings: None,
            verdict: Verdict::Pass,
        }
    }

    /// AND of every check and decision verdict; any run error fails the run.
    fn seal(&mut self) {
        let ok = self.errors.is_empty()
            && self.reports.iter().all(|r| r.passed())
            && self.decisions.iter().all(|d| d.verdict == Verdict::Pass);
        self.verdict = if ok { Verdict::Pass } else { Verdict::Fail };
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<RunReport, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// One line per check and decision. Lossy.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "egl {} ({})", self.artifact_version, self.generator);
        for r in &self.reports {
            let _ = writeln!(out, "{}", r.summary());
            for n in r.notes.iter().filter(|n| n.starts_with("resolved")) {
                let _ = writeln!(out, "    {n}");
            }
            for w in r.witnesses.iter().take(3) {
                let _ = writeln!(out, "    witness: {} (residual {:.3e})", w.label, w.residual);
            }
        }
        for d in &self.decisions {
            let _ = write!(out, "{} {} [{}]: {}: {}", d.verdict, d.kind.as_str(), d.fixture, d.question, d.answer);
            if let Some(w) = &d.witness {
                let _ = write!(out, " (witness {w})");
            }
            if let Some(e) = d.expected {
                let _ = write!(out, ", expected {e}");
            }
            out.push('\n');
        }
        for s in &self.skipped {
            let _ = writeln!(out, "skip {} [{}]: {}", s.check, s.model, s.reason);
        }
        for e in &self.errors {
            let _ = writeln!(out, "error {} [{}]: {}", e.check, e.model, e.message);
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        if let Some(ts) = &self.timings {
            for t in ts {
                let _ = writeln!(out, "time {} [{}]: {:.3}s", t.check, t.model, t.seconds);
            }
        }
        let _ = writeln!(out, "overall: {}", self.verdict);
        out
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Text => self.to_text(),
        }
    }
}

fn symplectic_for(spec: &ModelSpec, dim: usize) -> Option<SymplecticModel> {
    match spec {
        ModelSpec::SymplNonzero => Some(symplectic_nonzero_residue_model(None)),
        ModelSpec::SymplZero => Some(symplectic_zero_residue_model()),
        ModelSpec::Pair if dim == 2 => Some(pair_area_model()),
        _ => None,
    }
}

fn not_applicable(check: &str, model: &GroupoidChartModel) -> VerifyError {
    VerifyError::NotApplicable { check: check.into(), model: model.name().into() }
}

/// Runs one named check on one model.
pub fn run_check(
    check: &str,
    spec: &ModelSpec,
    dim: usize,
    model: &GroupoidChartModel,
    samples: usize,
    seed: u64,
    prof: &ToleranceProfile,
) -> Result<Vec<CheckReport>, VerifyError> {
    let sym = || symplectic_for(spec, dim).ok_or_else(|| not_applicable(check, model));
    match check {
        "axioms" => Ok(vec![check_groupoid_axioms(model, samples, seed, prof)?]),
        "negative-control" => Ok(vec![check_negative_control(model, samples, seed, prof)?]),
        "algebroid" => Ok(vec![check_algebroid(model, samples, seed, prof)?]),
        "omega" => Ok(vec![check_omega_pullback(&sym()?, samples, seed, OMEGA_TOL, prof)?]),
        "closed" => Ok(vec![check_closed(&sym()?, samples, seed, CLOSED_TOL, prof)?]),
        "nondegenerate" => Ok(vec![check_nondegenerate(&sym()?, NONDEGENERATE_MIN, prof)?]),
        "multiplicative" => Ok(vec![check_multiplicative(&sym()?, samples, seed, MULTIPLICATIVE_TOL, prof)?]),
        "poisson" => Ok(vec![check_poisson(&sym()?, samples, seed, POISSON_TOL, prof)?]),
        "morphism" => {
            let cases: &[MorphismCase] = match spec {
                ModelSpec::SymplNonzero => &[MorphismCase::PhiNonzero],
                ModelSpec::SymplZero => &[MorphismCase::PhiZero, MorphismCase::ChiZero],
                ModelSpec::SscSurface | ModelSpec::ActionGroupoid => return Err(not_applicable(check, model)),
                _ => &[MorphismCase::Beta],
            };
            let mut out = Vec::new();
            for &c in cases {
                out.extend(check_morphism(c, model, samples, seed, MORPHISM_TOL, prof)?);
            }
            Ok(out)
        }
        "psi" => match spec {
            ModelSpec::SscSurface => Ok(vec![resolve_psi_convention(samples, seed, PSI_TOL)?.to_report(seed, PSI_TOL, prof)]),
            _ => Err(not_applicable(check, model)),
        },
        "erratum" => match spec {
            ModelSpec::SymplNonzero => check_errata(ResidueKind::Nonzero, samples, seed, prof),
            ModelSpec::SymplZero => check_errata(ResidueKind::Zero, samples, seed, prof),
            _ => Err(not_applicable(check, model)),
        },
        "apath" => match spec {
            ModelSpec::Case1 | ModelSpec::CaseIV(_) => check_apath(model.base_dim(), prof),
            _ => Err(not_applicable(check, model)),
        },
        other => Err(VerifyError::InvalidConfig(format!("unknown check `{other}`"))),
    }
}

/// Runs every requested check on every requested model, in config order.
/// Pairs that do not apply are listed as skipped.
pub fn run_verify(config: &RunConfig) -> Result<RunReport, ConfigError> {
    let (prof, models) = config.validate()?;
    let mut report = RunReport::empty(Some(config.clone()));
    let mut timings = Vec::new();
    let checks = config.checks_to_run();
    for ((spec, model), req) in models.iter().zip(&config.models) {
        let dim = req.resolved_dim(spec);
        for check in &checks {
            let started = Instant::now();
            let result = run_check(check, spec, dim, model, config.samples_for(check), config.seed, &prof);
            if config.timings {
                timings.push(Timing {
                    check: check.clone(),
                    model: model.name().to_string(),
                    seconds: started.elapsed().as_secs_f64(),
                });
            }
            match result {
                Ok(rs) => report.reports.extend(rs),
                Err(VerifyError::NotApplicable { .. }) => report.skipped.push(Skipped {
                    check: check.clone(),
                    model: model.name().to_string(),
                    reason: "does not apply to this model".into(),
                }),
                Err(e) => report.errors.push(RunError {
                    check: check.clone(),
                    model: model.name().to_string(),
                    message: e.to_string(),
                }),
            }
        }
        if *spec == ModelSpec::SymplZero {
            report.notes.push(
                "sympl-zero multiplies third coordinates by c + b·c′; the variant c + b′·c is not associative \
                 (see the erratum check)"
                    .into(),
            );
        }
    }
    if config.timings {
        report.timings = Some(timings);
    }
    report.seal();
    Ok(report)
}

#[derive(Debug, Error)]
pub enum DecideError {
    #[error(transparent)]
    Fixture(#[from] FixtureError),
    #[error("{path}: no `{section}` section")]
    MissingSection { path: String, section: &'static str },
    #[error("{path}: {source}")]
    Topology { path: String, source: TopologyError },
}

/// Fixture directory: `$EGL_FIXTURES`, else `fixtures`.
pub fn fixture_dir() -> PathBuf {
    std::env::var_os("EGL_FIXTURES").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("fixtures"))
}

/// Existing paths are used as given; otherwise a relative path is looked up
/// in the fixture directory, with a leading `fixtures/` dropped.
pub fn resolve_fixture(path: &Path) -> PathBuf {
    if path.exists() || path.is_absolute() {
        return path.to_path_buf();
    }
    let dir = fixture_dir();
    let rel = path.strip_prefix("fixtures").unwrap_or(path);
    dir.join(rel)
}

/// Runs one decision on a parsed document.
pub fn decide_document(doc: &DecisionDocument, kind: DecisionKind, shown: &str) -> Result<DecisionResult, DecideError> {
    let topo = |source| DecideError::Topology { path: shown.to_string(), source };
    let missing = |section| DecideError::MissingSection { path: shown.to_string(), section };
    let expected = doc.expected.as_ref().and_then(|e| match kind {
        DecisionKind::Smooth => e.hausdorff,
        DecisionKind::DoubleCover => e.double_cover,
        DecisionKind::NormalCrossing => e.normal_crossing,
    });
    let (question, answer, witness, details) = match kind {
        DecisionKind::Smooth => {
            let input = doc.smooth.as_ref().ok_or_else(|| missing("smooth"))?;
            let hom = input.to_hom().map_err(topo)?;
            let eta = input.eta().map_err(topo)?;
            let d = hausdorff_smooth_decision(&hom, &eta).map_err(topo)?;
            let witness = d.witness.as_ref().map(|w| format!("({})", w.join(", ")));
            ("hausdorff", d.hausdorff, witness, serde_json::to_value(&d).expect("serializes"))
        }
        DecisionKind::DoubleCover => {
            let input = doc.double_cover.as_ref().ok_or_else(|| missing("double_cover"))?;
            input.validate().map_err(topo)?;
            let exists = double_cover_exists(&input.i_pullback, &input.eta_class).map_err(topo)?;
            let details = serde_json::json!({ "eta_in_image": exists });
            ("exists", exists, None, details)
        }
        DecisionKind::NormalCrossing => {
            let input = doc.normal_crossing.as_ref().ok_or_else(|| missing("normal_crossing"))?;
            let strata = input.to_strata().map_err(topo)?;
            let d = hausdorff_nc_decision(&strata).map_err(topo)?;
            let witness = d
                .strata
                .iter()
                .find_map(|s| s.witness.as_ref().map(|w| format!("{}: {w}", s.name)));
            ("hausdorff", d.hausdorff, witness, serde_json::to_value(&d).expect("serializes"))
        }
    };
    let verdict = match expected {
        Some(e) if e != answer => Verdict::Fail,
        _ => Verdict::Pass,
    };
    Ok(DecisionResult {
        kind,
        fixture: doc.name.clone(),
        question: question.to_string(),
        answer,
        witness,
        expected,
        verdict,
        details,
    })
}

/// Loads each input and runs the decision on it.
pub fn run_decide(inputs: &[PathBuf], kind: DecisionKind) -> Result<RunReport, DecideError> {
    let mut report = RunReport::empty(None);
    for p in inputs {
        let path = resolve_fixture(p);
        let doc = load_decision_document(&path)?;
        report.decisions.push(decide_document(&doc, kind, &path.display().to_string())?);
    }
    report.seal();
    Ok(report)
}
