//! Signed permutations `(ℤ/2)^k ⋊ Σ_k` and their action on `(ℂ*)^k`.
//!
//! Convention: `(σ,ε)(σ′,ε′) = (σσ′, ε′ + σ′⁻¹ε)` with `(σ′⁻¹ε)_i = ε_{σ′(i)}`
//! and `(σσ′)(i) = σ(σ′(i))`. The action is `(g·z)_{σ(i)} = conj^{ε_i}(z_i)`:
//! each coordinate carries its flag along when it is permuted.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::TopologyError;

/// Largest `k` for which subgroups are enumerated.
pub const MAX_K: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SignedPermutation {
    /// `perm[i] = σ(i)`, zero-based.
    pub perm: Vec<usize>,
    /// `flips[i] ∈ {0, 1}`
    pub flips: Vec<u8>,
}

impl fmt::Display for SignedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(σ={:?}, ε={:?})", self.perm, self.flips)
    }
}

impl SignedPermutation {
    pub fn new(perm: Vec<usize>, flips: Vec<u8>) -> Result<Self, TopologyError> {
        let k = perm.len();
        if flips.len() != k {
            return Err(TopologyError::DimensionMismatch { what: "flips".into(), expected: k, got: flips.len() });
        }
        let mut seen = vec![false; k];
        for &p in &perm {
            if p >= k || seen[p] {
                return Err(TopologyError::MalformedPresentation(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        if flips.iter().any(|&e| e > 1) {
            return Err(TopologyError::MalformedPresentation(format!("flips {flips:?} must be 0 or 1")));
        }
        Ok(SignedPermutation { perm, flips })
    }

    pub fn identity(k: usize) -> Self {
        SignedPermutation { perm: (0..k).collect(), flips: vec![0; k] }
    }

    /// The pure flip of coordinate `i`.
    pub fn flip(k: usize, i: usize) -> Self {
        let mut g = Self::identity(k);
        g.flips[i] = 1;
        g
    }

    /// Transposition of coordinates `i` and `j`.
    pub fn swap(k: usize, i: usize, j: usize) -> Self {
        let mut g = Self::identity(k);
        g.perm.swap(i, j);
        g
    }

    pub fn k(&self) -> usize {
        self.perm.len()
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p) && self.flips.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &SignedPermutation) -> Result<SignedPermutation, TopologyError> {
        let k = self.k();
        if other.k() != k {
            return Err(TopologyError::DimensionMismatch { what: "signed permutation".into(), expected: k, got: other.k() });
        }
        let perm = (0..k).map(|i| self.perm[other.perm[i]]).collect();
        let flips = (0..k).map(|i| other.flips[i] ^ self.flips[other.perm[i]]).collect();
        Ok(SignedPermutation { perm, flips })
    }

    pub fn inv(&self) -> SignedPermutation {
        let k = self.k();
        let mut perm = vec![0; k];
        for i in 0..k {
            perm[self.perm[i]] = i;
        }
        let flips = (0..k).map(|i| self.flips[perm[i]]).collect();
        SignedPermutation { perm, flips }
    }

    /// `(g·z)_{σ(i)} = conj^{ε_i}(z_i)`
    pub fn act(&self, z: &[Complex64]) -> Result<Vec<Complex64>, TopologyError> {
        let k = self.k();
        if z.len() != k {
            return Err(TopologyError::DimensionMismatch { what: "complex vector".into(), expected: k, got: z.len() });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); k];
        for i in 0..k {
            out[self.perm[i]] = if self.flips[i] == 1 { z[i].conj() } else { z[i] };
        }
        Ok(out)
    }

    /// Whether the pure permutation part is trivial on flags.
    pub fn is_pure_permutation(&self) -> bool {
        self.flips.iter().all(|&e| e == 0)
    }
}

/// Element `(z, g)` of `(ℂ*)^k ⋊ ((ℤ/2)^k ⋊ Σ_k)`, or of the discrete group
/// alone when `z` is omitted.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistElement {
    pub z: Option<Vec<Complex64>>,
    pub g: SignedPermutation,
}

impl TwistElement {
    pub fn new(z: Option<Vec<Complex64>>, g: SignedPermutation) -> Self {
        TwistElement { z, g }
    }

    pub fn identity(k: usize, with_torus: bool) -> Self {
        TwistElement { z: with_torus.then(|| vec![Complex64::new(1.0, 0.0); k]), g: SignedPermutation::identity(k) }
    }

    pub fn inv(&self) -> Result<TwistElement, TopologyError> {
        let gi = self.g.inv();
        let z = match &self.z {
            Some(z) => Some(gi.act(&z.iter().map(|c| c.inv()).collect::<Vec<_>>())?),
            None => None,
        };
        Ok(TwistElement { z, g: gi })
    }
}

/// `(z, g)·(z′, g′) = (z ⊙ g·z′, gg′)`
pub fn semidirect_mul(a: &TwistElement, b: &TwistElement) -> Result<TwistElement, TopologyError> {
    let g = a.g.mul(&b.g)?;
    let z = match (&a.z, &b.z) {
        (Some(z1), Some(z2)) => {
            let moved = a.g.act(z2)?;
            Some(z1.iter().zip(&moved).map(|(x, y)| x * y).collect())
        }
        (None, None) => None,
        _ => {
            return Err(TopologyError::MalformedPresentation("cannot multiply torus and discrete elements".into()));
        }
    };
    Ok(TwistElement { z, g })
}

/// `a b a⁻¹`
pub fn conjugate(a: &TwistElement, b: &TwistElement) -> Result<TwistElement, TopologyError> {
    semidirect_mul(&semidirect_mul(a, b)?, &a.inv()?)
}

/// Every element of `(ℤ/2)^k ⋊ Σ_k`, sorted.
pub fn all_signed_permutations(k: usize) -> Result<Vec<SignedPermutation>, TopologyError> {
    if k > MAX_K {
        return Err(TopologyError::KTooLarge { k, max: MAX_K });
    }
    let mut perms: Vec<Vec<usize>> = vec![vec![]];
    for n in 0..k {
        let mut next = Vec::new();
        for p in &perms {
            for pos in 0..=n {
                let mut q = p.clone();
                q.insert(pos, n);
                next.push(q);
            }
        }
        perms = next;
    }
    let mut out = Vec::with_capacity(perms.len() << k);
    for p in perms {
        for mask in 0..(1u32 << k) {
            let flips = (0..k).map(|i| ((mask >> i) & 1) as u8).collect();
            out.push(SignedPermutation { perm: p.clone(), flips });
        }
    }
    out.sort();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwistGroup {
    pub k: usize,
    /// Sorted element list.
    pub elements: Vec<SignedPermutation>,
    /// The group is trivial.
    pub untwisted_coorientable: bool,
}

impl TwistGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: &SignedPermutation) -> bool {
        self.elements.binary_search(g).is_ok()
    }
}

/// Closure of the generators under multiplication.
pub fn twist_group(k: usize, generators: &[SignedPermutation]) -> Result<TwistGroup, TopologyError> {
    if k > MAX_K {
        return Err(TopologyError::KTooLarge { k, max: MAX_K });
    }
    for g in generators {
        if g.k() != k {
            return Err(TopologyError::DimensionMismatch { what: "generator".into(), expected: k, got: g.k() });
        }
    }
    let mut seen: BTreeSet<SignedPermutation> = BTreeSet::new();
    let mut queue = VecDeque::new();
    let id = SignedPermutation::identity(k);
    seen.insert(id.clone());
    queue.push_back(id);
    while let Some(x) = queue.pop_front() {
        for g in generators {
            let y = x.mul(g)?;
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    let elements: Vec<SignedPermutation> = seen.into_iter().collect();
    let untwisted_coorientable = elements.len() == 1;
    Ok(TwistGroup { k, elements, untwisted_coorientable })
}

/// Isotropy of an orbit before taking the covering quotient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FiberIsotropy {
    /// `(ℂ*)^j`
    Torus(usize),
    Named(String),
}

impl fmt::Display for FiberIsotropy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiberIsotropy::Torus(1) => f.write_str("ℂ*"),
            FiberIsotropy::Torus(j) => write!(f, "(ℂ*){}", superscript(*j)),
            FiberIsotropy::Named(s) => f.write_str(s),
        }
    }
}

fn superscript(n: usize) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string().chars().map(|c| DIGITS[c.to_digit(10).unwrap() as usize]).collect()
}

fn subscript(n: usize) -> String {
    const DIGITS: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];
    n.to_string().chars().map(|c| DIGITS[c.to_digit(10).unwrap() as usize]).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsotropyDescriptor {
    pub label: String,
    pub fiber: String,
    pub image: String,
    pub image_order: usize,
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// `H_O ⋊ image`, with the image the subgroup generated by the monodromy
/// images acting as in [`semidirect_mul`].
pub fn covering_isotropy(
    k: usize,
    images: &[SignedPermutation],
    fiber: &FiberIsotropy,
) -> Result<IsotropyDescriptor, TopologyError> {
    let group = twist_group(k, images)?;
    let n = group.order();
    let fiber_label = fiber.to_string();
    if n == 1 {
        return Ok(IsotropyDescriptor { label: fiber_label.clone(), fiber: fiber_label, image: "1".into(), image_order: 1 });
    }
    let pure = group.elements.iter().all(|g| g.is_pure_permutation());
    let image = if k >= 2 && pure && n == factorial(k) {
        format!("Σ{}", subscript(k))
    } else if n == 2 {
        "ℤ/2".to_string()
    } else if n == factorial(k) << k {
        format!("(ℤ/2){}⋊Σ{}", superscript(k), subscript(k))
    } else {
        format!("G(order {n})")
    };
    Ok(IsotropyDescriptor { label: format!("{fiber_label}⋊{image}"), fiber: fiber_label, image, image_order: n })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn k1_conjugation_product() {
        let alpha = SignedPermutation::flip(1, 0);
        let (l, m) = (c(0.3, 0.8), c(-1.2, 0.5));
        let a = TwistElement::new(Some(vec![l]), alpha.clone());
        let b = TwistElement::new(Some(vec![m]), alpha);
        let ab = semidirect_mul(&a, &b).unwrap();
        assert!(ab.g.is_identity());
        assert!((ab.z.unwrap()[0] - l * m.conj()).norm() < 1e-15);
    }

    #[test]
    fn action_is_compatible_with_the_law() {
        let all = all_signed_permutations(3).unwrap();
        let z = vec![c(0.3, 0.8), c(-1.2, 0.5), c(2.0, -0.1)];
        for g in &all {
            for h in &all {
                let lhs = g.mul(h).unwrap().act(&z).unwrap();
                let rhs = g.act(&h.act(&z).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn inverse_and_identity() {
        for g in all_signed_permutations(3).unwrap() {
            assert!(g.mul(&g.inv()).unwrap().is_identity());
            assert!(g.inv().mul(&g).unwrap().is_identity());
        }
    }

    #[test]
    fn twist_group_orders() {
        let triv = twist_group(2, &[]).unwrap();
        assert!(triv.untwisted_coorientable);
        assert_eq!(twist_group(1, &[SignedPermutation::flip(1, 0)]).unwrap().order(), 2);
        let d8 = twist_group(2, &[SignedPermutation::swap(2, 0, 1), SignedPermutation::flip(2, 0)]).unwrap();
        assert_eq!(d8.order(), 8);
        assert_eq!(d8.elements, all_signed_permutations(2).unwrap());
        assert!(matches!(twist_group(9, &[]), Err(TopologyError::KTooLarge { .. })));
    }

    #[test]
    fn isotropy_labels() {
        let t1 = FiberIsotropy::Torus(1);
        assert_eq!(covering_isotropy(1, &[], &t1).unwrap().label, "ℂ*");
        assert_eq!(covering_isotropy(1, &[SignedPermutation::flip(1, 0)], &t1).unwrap().label, "ℂ*⋊ℤ/2");
        let t2 = FiberIsotropy::Torus(2);
        assert_eq!(covering_isotropy(2, &[SignedPermutation::swap(2, 0, 1)], &t2).unwrap().label, "(ℂ*)²⋊Σ₂");
        let full = [SignedPermutation::swap(2, 0, 1), SignedPermutation::flip(2, 0)];
        assert_eq!(covering_isotropy(2, &full, &t2).unwrap().label, "(ℂ*)²⋊(ℤ/2)²⋊Σ₂");
    }

    #[test]
    fn conjugates_of_a_flip_element_move_continuously() {
        // (λ,1)(v,α)(λ,1)⁻¹ = (λ v λ̄⁻¹, α)
        let v = TwistElement::new(Some(vec![c(0.7, 0.2)]), SignedPermutation::flip(1, 0));
        let l = c(1.3, -0.4);
        let a = TwistElement::new(Some(vec![l]), SignedPermutation::identity(1));
        let conj = conjugate(&a, &v).unwrap();
        let expect = l * c(0.7, 0.2) / l.conj();
        assert!((conj.z.unwrap()[0] - expect).norm() < 1e-14);
        assert_eq!(conj.g, SignedPermutation::flip(1, 0));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SignedPermutation::new(vec![0, 0], vec![0, 0]).is_err());
        assert!(SignedPermutation::new(vec![0, 1], vec![0]).is_err());
        assert!(SignedPermutation::new(vec![1, 0], vec![0, 2]).is_err());
        let a = SignedPermutation::identity(2);
        assert!(a.mul(&SignedPermutation::identity(3)).is_err());
    }
}
