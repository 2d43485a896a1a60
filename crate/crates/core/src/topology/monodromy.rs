//! Monodromy representations of `π₁` of strata, words in their generators,
//! and the normal-crossing Hausdorff decision.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::signed::{twist_group, SignedPermutation};
use super::TopologyError;

/// A word `g₁^{e₁} ⋯ g_n^{e_n}` in named generators.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Word(pub Vec<(String, i64)>);

impl Word {
    /// Whitespace-separated letters `a`, `a^-1`, `a^3`.
    pub fn parse(s: &str) -> Result<Word, TopologyError> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let (name, exp) = match tok.split_once('^') {
                Some((n, e)) => {
                    let e: i64 = e.parse().map_err(|_| TopologyError::MalformedWord(s.to_string()))?;
                    (n, e)
                }
                None => (tok, 1),
            };
            if name.is_empty() {
                return Err(TopologyError::MalformedWord(s.to_string()));
            }
            letters.push((name.to_string(), exp));
        }
        Ok(Word(letters))
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word(self.0.iter().chain(&other.0).cloned().collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> =
            self.0.iter().map(|(n, e)| if *e == 1 { n.clone() } else { format!("{n}^{e}") }).collect();
        f.write_str(&parts.join(" "))
    }
}

/// `φ : π₁(N) → (ℤ/2)^k ⋊ Σ_k` on named generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonodromyRep {
    k: usize,
    images: BTreeMap<String, SignedPermutation>,
}

impl MonodromyRep {
    pub fn new(k: usize, images: BTreeMap<String, SignedPermutation>) -> Result<Self, TopologyError> {
        for (name, g) in &images {
            if g.k() != k {
                return Err(TopologyError::DimensionMismatch {
                    what: format!("image of generator `{name}`"),
                    expected: k,
                    got: g.k(),
                });
            }
        }
        Ok(MonodromyRep { k, images })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn generators(&self) -> impl Iterator<Item = &String> {
        self.images.keys()
    }

    pub fn images(&self) -> impl Iterator<Item = &SignedPermutation> {
        self.images.values()
    }

    pub fn image(&self, name: &str) -> Option<&SignedPermutation> {
        self.images.get(name)
    }

    pub fn eval(&self, word: &Word) -> Result<SignedPermutation, TopologyError> {
        let mut acc = SignedPermutation::identity(self.k);
        for (name, e) in &word.0 {
            let g = self.images.get(name).ok_or_else(|| TopologyError::UnknownGenerator(name.clone()))?;
            let step = if *e < 0 { g.inv() } else { g.clone() };
            for _ in 0..e.unsigned_abs() {
                acc = acc.mul(&step)?;
            }
        }
        Ok(acc)
    }
}

/// One stratum `N`: its monodromy and words generating `ker (ι_N)_*`.
#[derive(Debug, Clone)]
pub struct Stratum {
    pub name: String,
    pub rep: MonodromyRep,
    pub kernel_words: Vec<Word>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StratumResult {
    pub name: String,
    pub k: usize,
    pub twist_group_order: usize,
    pub untwisted_coorientable: bool,
    pub contained: bool,
    /// First kernel word with nontrivial monodromy, and its image.
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NcDecision {
    pub hausdorff: bool,
    pub strata: Vec<StratumResult>,
}

/// Hausdorff iff `ker (ι_N)_* ⊆ ker φ_N` for every stratum, checked on the
/// supplied kernel words in the declared target of each representation.
pub fn hausdorff_nc_decision(strata: &[Stratum]) -> Result<NcDecision, TopologyError> {
    let mut results = Vec::with_capacity(strata.len());
    for s in strata {
        let images: Vec<SignedPermutation> = s.rep.images().cloned().collect();
        let group = twist_group(s.rep.k(), &images)?;
        let mut witness = None;
        for w in &s.kernel_words {
            let g = s.rep.eval(w)?;
            if !g.is_identity() && witness.is_none() {
                witness = Some(format!("{w} ↦ {g}"));
            }
        }
        results.push(StratumResult {
            name: s.name.clone(),
            k: s.rep.k(),
            twist_group_order: group.order(),
            untwisted_coorientable: group.untwisted_coorientable,
            contained: witness.is_none(),
            witness,
        });
    }
    Ok(NcDecision { hausdorff: results.iter().all(|r| r.contained), strata: results })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rep(k: usize, gens: &[(&str, SignedPermutation)]) -> MonodromyRep {
        MonodromyRep::new(k, gens.iter().map(|(n, g)| (n.to_string(), g.clone())).collect()).unwrap()
    }

    #[test]
    fn word_parsing() {
        let w = Word::parse("a b^-1 a^3").unwrap();
        assert_eq!(w.0, vec![("a".into(), 1), ("b".into(), -1), ("a".into(), 3)]);
        assert_eq!(w.to_string(), "a b^-1 a^3");
        assert!(Word::parse("a^x").is_err());
        assert!(Word::parse("^2").is_err());
        assert!(Word::parse("").unwrap().is_empty());
    }

    #[test]
    fn evaluation() {
        let r = rep(2, &[("a", SignedPermutation::swap(2, 0, 1)), ("b", SignedPermutation::flip(2, 0))]);
        assert!(r.eval(&Word::parse("a a").unwrap()).unwrap().is_identity());
        assert!(r.eval(&Word::parse("a^-1 a").unwrap()).unwrap().is_identity());
        assert!(!r.eval(&Word::parse("a b a^-1 b^-1").unwrap()).unwrap().is_identity());
        assert!(matches!(r.eval(&Word::parse("c").unwrap()), Err(TopologyError::UnknownGenerator(_))));
    }

    #[test]
    fn trivial_and_flip_strata() {
        let trivial = Stratum {
            name: "N".into(),
            rep: rep(1, &[("a", SignedPermutation::identity(1))]),
            kernel_words: vec![Word::parse("a").unwrap()],
        };
        assert!(hausdorff_nc_decision(&[trivial.clone()]).unwrap().hausdorff);
        let flip = Stratum {
            name: "N".into(),
            rep: rep(1, &[("a", SignedPermutation::flip(1, 0))]),
            kernel_words: vec![Word::parse("a").unwrap()],
        };
        let d = hausdorff_nc_decision(&[trivial, flip]).unwrap();
        assert!(!d.hausdorff);
        assert!(d.strata[0].contained && !d.strata[1].contained);
        assert!(d.strata[1].witness.is_some());
    }
}
