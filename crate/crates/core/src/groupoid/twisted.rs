//! Arrows over a normal-crossing stratum with discrete monodromy part:
//! `(ℂ*)^j × φ(π₁)` with composition `z·Φ([γ])(z′)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::geometry::{sup_distance, Point};
use crate::topology::{MonodromyRep, SignedPermutation, TopologyError, Word};

/// Endpoint agreement required to compose twisted arrows.
pub const ENDPOINT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwistedArrow {
    pub source: Point,
    pub target: Point,
    #[serde(serialize_with = "serialize_complex")]
    pub z: Vec<Complex64>,
    pub word: Word,
    pub element: SignedPermutation,
}

fn serialize_complex<S: serde::Serializer>(z: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(z.len()))?;
    for c in z {
        seq.serialize_element(&[c.re, c.im])?;
    }
    seq.end()
}

impl TwistedArrow {
    /// Evaluates `word` in `rep`; every `z` entry must be nonzero.
    pub fn new(source: Point, target: Point, z: Vec<Complex64>, word: Word, rep: &MonodromyRep) -> Result<Self, TopologyError> {
        if z.len() != rep.k() {
            return Err(TopologyError::DimensionMismatch { what: "torus part".into(), expected: rep.k(), got: z.len() });
        }
        if let Some(index) = z.iter().position(|c| c.re == 0.0 && c.im == 0.0) {
            return Err(TopologyError::ZeroCoordinate { index });
        }
        let element = rep.eval(&word)?;
        Ok(TwistedArrow { source, target, z, word, element })
    }

    pub fn j(&self) -> usize {
        self.z.len()
    }
}

/// `a1 ∘ a2` for `a1.source = a2.target`: `z = a1.z ⊙ Φ(a1)·a2.z`, words
/// concatenated and re-evaluated.
pub fn twisted_compose(a1: &TwistedArrow, a2: &TwistedArrow, rep: &MonodromyRep) -> Result<TwistedArrow, TopologyError> {
    if a1.j() != a2.j() {
        return Err(TopologyError::StratumMismatch { left: a1.j(), right: a2.j() });
    }
    let gap = sup_distance(&a1.source, &a2.target);
    if !(gap <= ENDPOINT_TOL) {
        return Err(TopologyError::EndpointMismatch { gap });
    }
    let moved = a1.element.act(&a2.z)?;
    let z = a1.z.iter().zip(&moved).map(|(x, y)| x * y).collect();
    let word = a1.word.concat(&a2.word);
    let element = rep.eval(&word)?;
    Ok(TwistedArrow { source: a2.source.clone(), target: a1.target.clone(), z, word, element })
}

/// Same torus part; the stored word re-evaluated in the coarser representation.
pub fn kappa_restrict(arrow: &TwistedArrow, coarse: &MonodromyRep) -> Result<TwistedArrow, TopologyError> {
    if coarse.k() != arrow.j() {
        return Err(TopologyError::StratumMismatch { left: arrow.j(), right: coarse.k() });
    }
    let element = coarse.eval(&arrow.word)?;
    Ok(TwistedArrow { element, ..arrow.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{semidirect_mul, TwistElement};
    use std::collections::BTreeMap;

    fn rep1(flip: bool) -> MonodromyRep {
        let g = if flip { SignedPermutation::flip(1, 0) } else { SignedPermutation::identity(1) };
        MonodromyRep::new(1, BTreeMap::from([("a".to_string(), g)])).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn untwisted_composition_multiplies() {
        let r = rep1(false);
        let p = vec![0.0, 0.0, 0.5];
        let a = TwistedArrow::new(p.clone(), p.clone(), vec![c(0.5, 1.0)], Word::parse("a").unwrap(), &r).unwrap();
        let b = TwistedArrow::new(p.clone(), p.clone(), vec![c(2.0, -1.0)], Word::parse("a").unwrap(), &r).unwrap();
        let ab = twisted_compose(&a, &b, &r).unwrap();
        assert!((ab.z[0] - c(0.5, 1.0) * c(2.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn conjugation_flag_matches_semidirect_product() {
        let r = rep1(true);
        let p = vec![0.0, 0.0];
        let (l, m) = (c(0.3, 0.8), c(-1.2, 0.5));
        let a = TwistedArrow::new(p.clone(), p.clone(), vec![l], Word::parse("a").unwrap(), &r).unwrap();
        let b = TwistedArrow::new(p.clone(), p.clone(), vec![m], Word::parse("a").unwrap(), &r).unwrap();
        let ab = twisted_compose(&a, &b, &r).unwrap();
        let oracle = semidirect_mul(
            &TwistElement::new(Some(vec![l]), SignedPermutation::flip(1, 0)),
            &TwistElement::new(Some(vec![m]), SignedPermutation::flip(1, 0)),
        )
        .unwrap();
        assert_eq!(Some(ab.z.clone()), oracle.z);
        assert_eq!(ab.element, oracle.g);
        assert!((ab.z[0] - l * m.conj()).norm() < 1e-15);
    }

    #[test]
    fn errors() {
        let r = rep1(false);
        let a = TwistedArrow::new(vec![0.0], vec![0.0], vec![c(1.0, 0.0)], Word::default(), &r).unwrap();
        let b = TwistedArrow::new(vec![1.0], vec![1.0], vec![c(1.0, 0.0)], Word::default(), &r).unwrap();
        assert!(matches!(twisted_compose(&a, &b, &r), Err(TopologyError::EndpointMismatch { .. })));
        assert!(TwistedArrow::new(vec![0.0], vec![0.0], vec![c(0.0, 0.0)], Word::default(), &r).is_err());
        assert!(matches!(
            TwistedArrow::new(vec![0.0], vec![0.0], vec![c(1.0, 0.0)], Word::parse("q").unwrap(), &r),
            Err(TopologyError::UnknownGenerator(_))
        ));
    }

    #[test]
    fn kappa_with_the_same_rep_is_the_identity() {
        let r = rep1(true);
        let a = TwistedArrow::new(vec![0.0], vec![0.0], vec![c(1.0, 2.0)], Word::parse("a a a").unwrap(), &r).unwrap();
        assert_eq!(kappa_restrict(&a, &r).unwrap(), a);
        let coarse = kappa_restrict(&a, &rep1(false)).unwrap();
        assert!(coarse.element.is_identity());
        assert_eq!(coarse.z, a.z);
    }
}
