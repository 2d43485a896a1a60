//! Decision input documents (`egl.decision.v1`).
//!
//! Matrices are row-major arrays. A relation matrix has one row per
//! generator and one column per relation; `[]` means no relations.
//! Permutations are zero-based: `perm[i]` is the image of `i`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::homology::{HomologyPresentation, IntHom};
use super::monodromy::{MonodromyRep, Stratum, Word};
use super::signed::SignedPermutation;
use super::snf::IntMatrix;
use super::TopologyError;

pub const DECISION_SCHEMA: &str = "egl.decision.v1";

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}:{line}:{column}: at `{field}`: {message}")]
    Schema { path: String, line: usize, column: usize, field: String, message: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecisionDocument {
    pub schema: String,
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub smooth: Option<SmoothInput>,
    #[serde(default)]
    pub double_cover: Option<DoubleCoverInput>,
    #[serde(default)]
    pub normal_crossing: Option<NormalCrossingInput>,
    #[serde(default)]
    pub expected: Option<Expected>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationInput {
    pub generators: Vec<String>,
    #[serde(default)]
    pub relations: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmoothInput {
    /// `H₁(D;ℤ)`
    pub divisor: PresentationInput,
    /// `H₁(M;ℤ)`
    pub ambient: PresentationInput,
    /// One row per ambient generator, one column per divisor generator.
    pub i_star: Vec<Vec<i64>>,
    /// `η` mod 2 on divisor generators.
    pub eta: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoubleCoverInput {
    /// `i* : H¹(M;ℤ/2) → H¹(D;ℤ/2)`, one row per basis element of `H¹(D;ℤ/2)`.
    pub i_pullback: Vec<Vec<u8>>,
    pub eta_class: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalCrossingInput {
    pub strata: Vec<StratumInput>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratumInput {
    pub name: String,
    pub k: usize,
    pub generators: Vec<String>,
    pub images: BTreeMap<String, ImageInput>,
    #[serde(default)]
    pub kernel_words: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageInput {
    pub perm: Vec<usize>,
    pub flips: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    #[serde(default)]
    pub hausdorff: Option<bool>,
    #[serde(default)]
    pub double_cover: Option<bool>,
    #[serde(default)]
    pub normal_crossing: Option<bool>,
}

fn bits_ok(v: &[u8]) -> bool {
    v.iter().all(|&x| x <= 1)
}

fn matrix(rows: &[Vec<i64>], nrows: usize, ncols_hint: Option<usize>, what: &str) -> Result<IntMatrix, TopologyError> {
    if rows.is_empty() {
        return Ok(IntMatrix::zeros(nrows, ncols_hint.unwrap_or(0)));
    }
    if rows.len() != nrows {
        return Err(TopologyError::DimensionMismatch { what: format!("{what} rows"), expected: nrows, got: rows.len() });
    }
    let cols = rows[0].len();
    IntMatrix::from_rows(rows, cols)
        .ok_or_else(|| TopologyError::MalformedPresentation(format!("{what} has rows of different lengths")))
}

impl PresentationInput {
    pub fn to_presentation(&self) -> Result<HomologyPresentation, TopologyError> {
        let rel = matrix(&self.relations, self.generators.len(), None, "relations")?;
        HomologyPresentation::new(self.generators.clone(), rel)
    }
}

impl SmoothInput {
    pub fn to_hom(&self) -> Result<IntHom, TopologyError> {
        let dom = self.divisor.to_presentation()?;
        let cod = self.ambient.to_presentation()?;
        let f = matrix(&self.i_star, cod.rank(), Some(dom.rank()), "i_star")?;
        IntHom::new(f, dom, cod)
    }

    pub fn eta(&self) -> Result<Vec<u8>, TopologyError> {
        if !bits_ok(&self.eta) {
            return Err(TopologyError::MalformedPresentation("eta entries must be 0 or 1".into()));
        }
        Ok(self.eta.clone())
    }
}

impl DoubleCoverInput {
    pub fn validate(&self) -> Result<(), TopologyError> {
        if !bits_ok(&self.eta_class) || !self.i_pullback.iter().all(|r| bits_ok(r)) {
            return Err(TopologyError::MalformedPresentation("mod-2 entries must be 0 or 1".into()));
        }
        Ok(())
    }
}

impl StratumInput {
    pub fn to_stratum(&self) -> Result<Stratum, TopologyError> {
        let mut images = BTreeMap::new();
        for g in &self.generators {
            let img = self.images.get(g).ok_or_else(|| TopologyError::UnknownGenerator(g.clone()))?;
            images.insert(g.clone(), SignedPermutation::new(img.perm.clone(), img.flips.clone())?);
        }
        if let Some(extra) = self.images.keys().find(|n| !self.generators.contains(n)) {
            return Err(TopologyError::UnknownGenerator(extra.clone()));
        }
        let rep = MonodromyRep::new(self.k, images)?;
        let kernel_words = self.kernel_words.iter().map(|w| Word::parse(w)).collect::<Result<_, _>>()?;
        Ok(Stratum { name: self.name.clone(), rep, kernel_words })
    }
}

impl NormalCrossingInput {
    pub fn to_strata(&self) -> Result<Vec<Stratum>, TopologyError> {
        self.strata.iter().map(|s| s.to_stratum()).collect()
    }
}

/// Parses a decision document, reporting the failing field with its
/// line and column.
pub fn parse_decision_document(text: &str, path: &str) -> Result<DecisionDocument, FixtureError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: DecisionDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        FixtureError::Schema {
            path: path.to_string(),
            line: inner.line(),
            column: inner.column(),
            field,
            message: inner.to_string(),
        }
    })?;
    if doc.schema != DECISION_SCHEMA {
        return Err(FixtureError::Invalid {
            path: path.to_string(),
            message: format!("schema `{}` is not `{DECISION_SCHEMA}`", doc.schema),
        });
    }
    Ok(doc)
}

pub fn load_decision_document(path: &Path) -> Result<DecisionDocument, FixtureError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| FixtureError::Io { path: shown.clone(), message: e.to_string() })?;
    parse_decision_document(&text, &shown)
}

#[cfg(test)]
mod tests {
    use super::*;

    const KLEIN: &str = r#"{
        "schema": "egl.decision.v1",
        "name": "klein",
        "smooth": {
            "divisor": {"generators": ["ell", "fib"], "relations": [[0], [2]]},
            "ambient": {"generators": ["x1", "x2", "x3", "x4"], "relations": []},
            "i_star": [[2, 0], [0, 0], [0, 0], [0, 0]],
            "eta": [1, 0]
        }
    }"#;

    #[test]
    fn parses_and_converts() {
        let doc = parse_decision_document(KLEIN, "inline").unwrap();
        let hom = doc.smooth.unwrap().to_hom().unwrap();
        assert_eq!(hom.domain().invariants().0, 1);
    }

    #[test]
    fn unknown_fields_are_reported_with_position() {
        let bad = KLEIN.replace("\"eta\"", "\"etta\"");
        match parse_decision_document(&bad, "inline") {
            Err(FixtureError::Schema { field, line, .. }) => {
                assert!(field.starts_with("smooth"), "{field}");
                assert!(line > 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wrong_schema_version() {
        let bad = KLEIN.replace("egl.decision.v1", "egl.decision.v0");
        assert!(matches!(parse_decision_document(&bad, "inline"), Err(FixtureError::Invalid { .. })));
    }
}
