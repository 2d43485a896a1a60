//! Chart-level Lie groupoid models.
//!
//! Each model is a value holding closed-form evaluators for the structure
//! maps on one coordinate chart, plus the samplers the verification suites
//! use to produce valid and exactly composable arrows.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use thiserror::Error;

use crate::divisor::DivisorError;
use crate::geometry::{sup_distance, GeometryError, Point, SmoothMap};
use crate::rng::{uniform_vec, Rng};

pub mod action;
pub mod elliptic;
pub mod fibre;
pub mod morphisms;
pub mod surface;
pub mod symplectic;
pub mod twisted;

pub use action::action_groupoid_model;
pub use elliptic::{case1_model, case2_quotient_model, caseIV_model, elliptic_chart, elliptic_ideal_pullback, pair_model};
pub use fibre::fibre_product;
pub use morphisms::{morphism_phi_nonzero, morphism_phi_zero, morphism_psi};
pub use surface::{adh_model, ssc_surface_model, Anchor, Exponent};
pub use symplectic::{symplectic_nonzero_residue_model, symplectic_zero_residue_model, SymplecticModel};
pub use twisted::{twisted_compose, TwistedArrow};

pub const DEFAULT_COMPOSABLE_TOL: f64 = 1e-9;
const MAX_LIFT_ATTEMPTS: usize = 256;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("{model}: point {point:?} is not a valid arrow")]
    ChartInvalid { model: String, point: Vec<f64> },
    #[error("{model}: point {point:?} is not in the base")]
    BaseInvalid { model: String, point: Vec<f64> },
    #[error("{model}: arrows not composable, |s(g) - t(h)| = {gap:e}")]
    NotComposable { model: String, gap: f64 },
    #[error("fibre product not transverse: combined rank {rank}, expected {expected}")]
    NotTransverse { rank: usize, expected: usize },
    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("{model}: sampler could not produce a valid arrow")]
    SamplerExhausted { model: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Divisor(#[from] DivisorError),
}

pub(crate) type ComposeFn = dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync;
pub(crate) type LiftFn = dyn Fn(&[f64], &[f64]) -> Option<Vec<f64>> + Send + Sync;
pub(crate) type BetweenFn = dyn Fn(&[f64], &[f64], &[f64]) -> Option<Vec<f64>> + Send + Sync;
pub(crate) type BaseSampler = dyn Fn(&mut Rng) -> Vec<f64> + Send + Sync;
pub(crate) type FrameFn = dyn Fn(&[f64]) -> Vec<DVector<f64>> + Send + Sync;

/// A groupoid `G ⇉ M` on one chart.
///
/// Arrow points may end in `discrete_dims` coordinates that only take
/// values 0 or 1; smooth maps are differentiated with those held fixed.
#[derive(Clone)]
pub struct GroupoidChartModel {
    pub(crate) name: String,
    pub(crate) arrow_dim: usize,
    pub(crate) base_dim: usize,
    pub(crate) discrete_dims: usize,
    pub(crate) source: SmoothMap,
    pub(crate) target: SmoothMap,
    pub(crate) inverse: SmoothMap,
    pub(crate) unit: SmoothMap,
    pub(crate) multiply: Arc<ComposeFn>,
    pub(crate) composable_tol: f64,
    pub(crate) hausdorff: bool,
    pub(crate) constraint: Option<SmoothMap>,
    /// `(target point, free parameters in [−1,1]^d) ↦ arrow with that target`.
    pub(crate) lift: Arc<LiftFn>,
    pub(crate) lift_free_dim: usize,
    pub(crate) base_sampler: Arc<BaseSampler>,
    /// Real index of the first coordinate of each divisor factor in the base.
    pub(crate) divisor_pairs: Vec<usize>,
    /// `(target, source, free) ↦ arrow`, for models whose orbits are unions
    /// of divisor strata.
    pub(crate) between: Option<Arc<BetweenFn>>,
    pub(crate) between_free_dim: usize,
    pub(crate) expected_algebroid: Option<Arc<FrameFn>>,
    /// `(real coordinate count, divisor factor count)` for elliptic charts.
    pub(crate) elliptic_layout: Option<(usize, usize)>,
}

impl fmt::Debug for GroupoidChartModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupoidChartModel({}, arrows ℝ^{}, base ℝ^{})", self.name, self.arrow_dim, self.base_dim)
    }
}

impl GroupoidChartModel {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arrow_dim(&self) -> usize {
        self.arrow_dim
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn discrete_dims(&self) -> usize {
        self.discrete_dims
    }

    pub fn composable_tol(&self) -> f64 {
        self.composable_tol
    }

    pub fn is_hausdorff(&self) -> bool {
        self.hausdorff
    }

    pub fn source_map(&self) -> &SmoothMap {
        &self.source
    }

    pub fn target_map(&self) -> &SmoothMap {
        &self.target
    }

    pub fn inverse_map(&self) -> &SmoothMap {
        &self.inverse
    }

    pub fn unit_map(&self) -> &SmoothMap {
        &self.unit
    }

    pub fn constraint(&self) -> Option<&SmoothMap> {
        self.constraint.as_ref()
    }

    pub fn divisor_pairs(&self) -> &[usize] {
        &self.divisor_pairs
    }

    pub fn lift_free_dim(&self) -> usize {
        self.lift_free_dim
    }

    pub fn has_expected_algebroid(&self) -> bool {
        self.expected_algebroid.is_some()
    }

    pub fn expected_algebroid(&self, p: &[f64]) -> Option<Vec<DVector<f64>>> {
        self.expected_algebroid.as_ref().map(|f| f(p))
    }

    pub fn is_arrow(&self, g: &[f64]) -> bool {
        if !self.source.contains(g) {
            return false;
        }
        match &self.constraint {
            Some(c) => c.eval(g).map(|v| v.iter().all(|x| x.abs() <= self.composable_tol)).unwrap_or(false),
            None => true,
        }
    }

    pub fn is_base_point(&self, p: &[f64]) -> bool {
        self.unit.contains(p)
    }

    fn require_arrow(&self, g: &[f64]) -> Result<(), ModelError> {
        if self.is_arrow(g) {
            Ok(())
        } else {
            Err(ModelError::ChartInvalid { model: self.name.clone(), point: g.to_vec() })
        }
    }

    pub fn s(&self, g: &[f64]) -> Result<Point, ModelError> {
        self.require_arrow(g)?;
        Ok(self.source.eval(g)?)
    }

    pub fn t(&self, g: &[f64]) -> Result<Point, ModelError> {
        self.require_arrow(g)?;
        Ok(self.target.eval(g)?)
    }

    pub fn inv(&self, g: &[f64]) -> Result<Point, ModelError> {
        self.require_arrow(g)?;
        Ok(self.inverse.eval(g)?)
    }

    pub fn unit_at(&self, p: &[f64]) -> Result<Point, ModelError> {
        if !self.is_base_point(p) {
            return Err(ModelError::BaseInvalid { model: self.name.clone(), point: p.to_vec() });
        }
        Ok(self.unit.eval(p)?)
    }

    /// `β(g) = (t(g), s(g))`.
    pub fn anchor_pair(&self, g: &[f64]) -> Result<(Point, Point), ModelError> {
        Ok((self.t(g)?, self.s(g)?))
    }

    pub fn m(&self, g: &[f64], h: &[f64]) -> Result<Point, ModelError> {
        let sg = self.s(g)?;
        let th = self.t(h)?;
        let gap = sup_distance(&sg, &th);
        if !(gap <= self.composable_tol) {
            return Err(ModelError::NotComposable { model: self.name.clone(), gap });
        }
        let gh = (self.multiply)(g, h);
        if gh.len() != self.arrow_dim || !gh.iter().all(|x| x.is_finite()) || !self.source.contains(&gh) {
            return Err(ModelError::ChartInvalid { model: self.name.clone(), point: gh });
        }
        Ok(gh)
    }

    /// Arrow with target `p` determined by free parameters in `[−1,1]^d`.
    pub fn lift(&self, p: &[f64], free: &[f64]) -> Result<Point, ModelError> {
        if !self.is_base_point(p) {
            return Err(ModelError::BaseInvalid { model: self.name.clone(), point: p.to_vec() });
        }
        match (self.lift)(p, free) {
            Some(g) if self.is_arrow(&g) => Ok(g),
            _ => Err(ModelError::SamplerExhausted { model: self.name.clone() }),
        }
    }

    /// Arrow from `q` to `p`, when the model exposes one.
    pub fn between(&self, p: &[f64], q: &[f64], free: &[f64]) -> Option<Point> {
        let f = self.between.as_ref()?;
        f(p, q, free).filter(|g| self.is_arrow(g))
    }

    pub fn between_free_dim(&self) -> usize {
        self.between_free_dim
    }

    pub fn sample_base(&self, rng: &mut Rng) -> Point {
        (self.base_sampler)(rng)
    }

    pub fn sample_free(&self, rng: &mut Rng) -> Vec<f64> {
        uniform_vec(rng, self.lift_free_dim, -1.0, 1.0)
    }

    pub fn sample_arrow_with_target(&self, p: &[f64], rng: &mut Rng) -> Result<Point, ModelError> {
        for _ in 0..MAX_LIFT_ATTEMPTS {
            let free = self.sample_free(rng);
            if let Ok(g) = self.lift(p, &free) {
                return Ok(g);
            }
        }
        Err(ModelError::SamplerExhausted { model: self.name.clone() })
    }

    pub fn sample_arrow(&self, rng: &mut Rng) -> Result<Point, ModelError> {
        for _ in 0..MAX_LIFT_ATTEMPTS {
            let p = self.sample_base(rng);
            if let Ok(g) = self.sample_arrow_with_target(&p, rng) {
                return Ok(g);
            }
        }
        Err(ModelError::SamplerExhausted { model: self.name.clone() })
    }

    /// `h` with `t(h) = s(g)` exactly.
    pub fn sample_composable(&self, g: &[f64], rng: &mut Rng) -> Result<Point, ModelError> {
        let sg = self.s(g)?;
        self.sample_arrow_with_target(&sg, rng)
    }

    /// Same model with a different multiplication, for negative controls and
    /// regression variants.
    pub fn with_multiplication<F>(&self, name: &str, f: F) -> GroupoidChartModel
    where
        F: Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        let mut m = self.clone();
        m.name = name.to_string();
        m.multiply = Arc::new(f);
        m
    }

    /// Multiplication with `delta` added to output coordinate `index`.
    pub fn perturbed(&self, index: usize, delta: f64) -> GroupoidChartModel {
        let base = self.multiply.clone();
        self.with_multiplication(&format!("{}+perturbed", self.name), move |g, h| {
            let mut out = base(g, h);
            if let Some(x) = out.get_mut(index) {
                *x += delta;
            }
            out
        })
    }

    /// Source, target and constraint restricted to the continuous
    /// coordinates, with the discrete tail fixed to `tail`.
    pub fn continuous_slice(&self, tail: &[f64]) -> (SmoothMap, SmoothMap, Option<SmoothMap>) {
        let c = self.arrow_dim - self.discrete_dims;
        let tail = tail.to_vec();
        let restrict = |f: &SmoothMap| {
            let f = f.clone();
            let fd = f.clone();
            let (t1, t2) = (tail.clone(), tail.clone());
            SmoothMap::new(c, f.codomain_dim(), move |p| {
                let mut full = p.to_vec();
                full.extend_from_slice(&t1);
                f.eval(&full).unwrap_or_else(|_| vec![f64::NAN; f.codomain_dim()])
            })
            .with_domain(move |p| {
                let mut full = p.to_vec();
                full.extend_from_slice(&t2);
                fd.contains(&full)
            })
        };
        (restrict(&self.source), restrict(&self.target), self.constraint.as_ref().map(restrict))
    }
}

/// Model names accepted on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelSpec {
    Case1,
    CaseIV(usize),
    Case2,
    Pair,
    SymplNonzero,
    SymplZero,
    SscSurface,
    ActionGroupoid,
    Fibre(Vec<ModelSpec>),
}

impl ModelSpec {
    pub fn parse(name: &str) -> Result<ModelSpec, ModelError> {
        if let Some(rest) = name.strip_prefix("fibre:") {
            let parts: Vec<ModelSpec> = rest.split(',').map(|p| ModelSpec::parse(p.trim())).collect::<Result<_, _>>()?;
            if parts.len() != 2 {
                return Err(ModelError::UnknownModel(name.to_string()));
            }
            for p in &parts {
                if !matches!(p, ModelSpec::Case1 | ModelSpec::CaseIV(_) | ModelSpec::Pair) {
                    return Err(ModelError::InvalidParameter(format!(
                        "fibre product factors must be case1, caseIV:k or pair, got `{name}`"
                    )));
                }
            }
            return Ok(ModelSpec::Fibre(parts));
        }
        if let Some(k) = name.strip_prefix("caseIV:") {
            let k: usize = k.parse().map_err(|_| ModelError::UnknownModel(name.to_string()))?;
            if k == 0 {
                return Err(ModelError::InvalidParameter("caseIV needs k ≥ 1".into()));
            }
            return Ok(ModelSpec::CaseIV(k));
        }
        match name {
            "case1" => Ok(ModelSpec::Case1),
            "caseIV" => Ok(ModelSpec::CaseIV(0)),
            "case2" => Ok(ModelSpec::Case2),
            "pair" => Ok(ModelSpec::Pair),
            "sympl-nonzero" => Ok(ModelSpec::SymplNonzero),
            "sympl-zero" => Ok(ModelSpec::SymplZero),
            "ssc-surface" => Ok(ModelSpec::SscSurface),
            "action-groupoid" => Ok(ModelSpec::ActionGroupoid),
            _ => Err(ModelError::UnknownModel(name.to_string())),
        }
    }

    /// Number of divisor factors this spec consumes in a fibre product.
    fn pairs_used(&self) -> usize {
        match self {
            ModelSpec::Case1 => 1,
            ModelSpec::CaseIV(k) => *k,
            ModelSpec::Fibre(parts) => parts.iter().map(|p| p.pairs_used()).sum(),
            _ => 0,
        }
    }

    pub fn default_dim(&self, k: Option<usize>) -> usize {
        match self {
            ModelSpec::Case1 | ModelSpec::Case2 => 4,
            ModelSpec::CaseIV(kk) => {
                let k = if *kk == 0 { k.unwrap_or(2) } else { *kk };
                (2 * k).max(4)
            }
            ModelSpec::Pair => 2,
            ModelSpec::SymplNonzero | ModelSpec::SscSurface => 2,
            ModelSpec::SymplZero | ModelSpec::ActionGroupoid => 4,
            ModelSpec::Fibre(_) => (2 * self.pairs_used()).max(2),
        }
    }

    /// Whether `--dim` is meaningful for this model.
    pub fn has_dim(&self) -> bool {
        matches!(self, ModelSpec::Case1 | ModelSpec::CaseIV(_) | ModelSpec::Case2 | ModelSpec::Pair | ModelSpec::Fibre(_))
    }

    pub fn build(&self, dim: Option<usize>, k: Option<usize>) -> Result<GroupoidChartModel, ModelError> {
        let n = dim.unwrap_or_else(|| self.default_dim(k));
        match self {
            ModelSpec::Case1 => case1_model(n),
            ModelSpec::CaseIV(kk) => {
                let k = if *kk == 0 { k.unwrap_or(2) } else { *kk };
                caseIV_model(n, k)
            }
            ModelSpec::Case2 => case2_quotient_model(n),
            ModelSpec::Pair => pair_model(n),
            ModelSpec::SymplNonzero => Ok(symplectic_nonzero_residue_model(None).groupoid),
            ModelSpec::SymplZero => Ok(symplectic_zero_residue_model().groupoid),
            ModelSpec::SscSurface => Ok(ssc_surface_model()),
            ModelSpec::ActionGroupoid => Ok(action_groupoid_model()),
            ModelSpec::Fibre(parts) => {
                let total: usize = parts.iter().map(|p| p.pairs_used()).sum();
                if 2 * total > n {
                    return Err(ModelError::InvalidParameter(format!(
                        "fibre product needs {total} divisor factors, which do not fit in dimension {n}"
                    )));
                }
                // Factors take consecutive divisor pairs from the end of the base.
                let mut next = n;
                let mut built = Vec::new();
                for p in parts {
                    let used = p.pairs_used();
                    let pairs: Vec<usize> = (0..used).map(|j| next - 2 * used + 2 * j).collect();
                    next -= 2 * used;
                    let label = match p {
                        ModelSpec::Case1 => "case1".to_string(),
                        ModelSpec::CaseIV(k) => format!("caseIV:{k}"),
                        _ => "pair".to_string(),
                    };
                    built.push(elliptic_chart(&label, n, pairs)?);
                }
                fibre_product(&built[0], &built[1])
            }
        }
    }
}

/// Names and one-line descriptions of the models the CLI can build.
pub fn model_catalogue() -> Vec<(&'static str, &'static str)> {
    vec![
        ("case1", "smooth coorientable elliptic divisor chart; --dim n (default 4)"),
        ("caseIV:k", "normal-crossing chart with k divisor factors; --dim n ≥ 2k"),
        ("case2", "non-coorientable divisor via the ℤ/2 quotient with a discrete sheet coordinate; --dim n"),
        ("pair", "pair groupoid of ℝⁿ; --dim n (default 2, carries the area form)"),
        ("sympl-nonzero", "symplectic groupoid of the elliptic Poisson structure with nonzero residue on ℝ²"),
        ("sympl-zero", "symplectic groupoid of the elliptic Poisson structure with zero residue on ℂ²"),
        ("ssc-surface", "source-simply-connected surface model (Z, ζ) ∈ ℂ² over ℂ"),
        ("action-groupoid", "action groupoid of ℂ*⋉ℂ on ℂ²"),
        ("fibre:A,B", "fibre product over base × base of two of case1, caseIV:k, pair"),
    ]
}
