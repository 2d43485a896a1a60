//! Finitely generated abelian groups by presentation, homomorphisms between
//! them, and the smooth-divisor Hausdorff and double-cover decisions.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use super::snf::{smith_normal_form, IntMatrix, Smith};
use super::TopologyError;

/// `ℤ^g / im(R)` with `R` a `g × r` integer matrix (columns are relations).
#[derive(Debug, Clone)]
pub struct HomologyPresentation {
    generators: Vec<String>,
    relations: IntMatrix,
    smith: Smith,
}

impl HomologyPresentation {
    pub fn new(generators: Vec<String>, relations: IntMatrix) -> Result<Self, TopologyError> {
        if relations.rows() != generators.len() {
            return Err(TopologyError::DimensionMismatch {
                what: "relation matrix rows".into(),
                expected: generators.len(),
                got: relations.rows(),
            });
        }
        let smith = smith_normal_form(&relations);
        Ok(HomologyPresentation { generators, relations, smith })
    }

    /// Free abelian group on the named generators.
    pub fn free(generators: Vec<String>) -> Self {
        let g = generators.len();
        Self::new(generators, IntMatrix::zeros(g, 0)).expect("shape is consistent")
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    /// Free rank and torsion coefficients `d > 1` of the group.
    pub fn invariants(&self) -> (usize, Vec<BigInt>) {
        let d = self.smith.invariant_factors();
        let free = self.rank() - d.len();
        (free, d.into_iter().filter(|x| *x != BigInt::from(1)).collect())
    }

    /// Whether `x ∈ ℤ^g` is zero in the group.
    pub fn is_zero(&self, x: &[BigInt]) -> bool {
        self.smith.column_lattice_contains(x)
    }
}

/// A homomorphism given on generators: column `j` is the image of domain
/// generator `j`.
#[derive(Debug, Clone)]
pub struct IntHom {
    matrix: IntMatrix,
    domain: HomologyPresentation,
    codomain: HomologyPresentation,
}

impl IntHom {
    /// Checks that every domain relation maps into the codomain relations.
    pub fn new(matrix: IntMatrix, domain: HomologyPresentation, codomain: HomologyPresentation) -> Result<Self, TopologyError> {
        if matrix.rows() != codomain.rank() || matrix.cols() != domain.rank() {
            return Err(TopologyError::MalformedPresentation(format!(
                "homomorphism matrix is {}×{}, expected {}×{}",
                matrix.rows(),
                matrix.cols(),
                codomain.rank(),
                domain.rank()
            )));
        }
        let image = matrix.mul(domain.relations());
        for j in 0..image.cols() {
            if !codomain.is_zero(&image.column(j)) {
                return Err(TopologyError::MalformedPresentation(format!(
                    "relation {j} of the domain does not map to zero in the codomain"
                )));
            }
        }
        Ok(IntHom { matrix, domain, codomain })
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn domain(&self) -> &HomologyPresentation {
        &self.domain
    }

    pub fn codomain(&self) -> &HomologyPresentation {
        &self.codomain
    }
}

/// Generators of `ker f` as a subgroup of the domain, omitting those that
/// are already zero there.
///
/// `x` is in the kernel iff `Fx + R_C y = 0` for some `y`; the integer kernel
/// of `[F | R_C]` is read off the last columns of `V` in its Smith form.
pub fn kernel_generators(f: &IntHom) -> Vec<Vec<BigInt>> {
    let g = f.domain.rank();
    let combined = f.matrix.hstack(f.codomain.relations());
    let sm = smith_normal_form(&combined);
    let rank = sm.rank();
    (rank..combined.cols())
        .map(|j| sm.v.column(j)[..g].to_vec())
        .filter(|x| x.iter().any(|c| !c.is_zero()) && !f.domain.is_zero(x))
        .collect()
}

fn parity(eta: &[u8], x: &[BigInt]) -> u8 {
    let total: BigInt = eta.iter().zip(x).filter(|(e, _)| **e % 2 == 1).map(|(_, c)| c.clone()).sum();
    if total.is_even() {
        0
    } else {
        1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SmoothDecision {
    pub hausdorff: bool,
    /// A kernel element on which `η` is odd, as domain coordinates.
    pub witness: Option<Vec<String>>,
    pub kernel_generators: Vec<Vec<String>>,
}

fn render(x: &[BigInt]) -> Vec<String> {
    x.iter().map(|c| c.to_string()).collect()
}

/// `η : H₁(D) → ℤ/2` factors through `i_*` (as a map on the subgroup
/// `i_*H₁(D)`) iff `η` vanishes on every generator of `ker i_*`.
pub fn hausdorff_smooth_decision(i_star: &IntHom, eta: &[u8]) -> Result<SmoothDecision, TopologyError> {
    let dom = i_star.domain();
    if eta.len() != dom.rank() {
        return Err(TopologyError::DimensionMismatch { what: "eta".into(), expected: dom.rank(), got: eta.len() });
    }
    let rel = dom.relations();
    for j in 0..rel.cols() {
        if parity(eta, &rel.column(j)) != 0 {
            return Err(TopologyError::MalformedPresentation(format!(
                "eta is odd on relation {j} of the divisor presentation"
            )));
        }
    }
    let kernel = kernel_generators(i_star);
    let witness = kernel.iter().find(|x| parity(eta, x) == 1).map(|x| render(x));
    Ok(SmoothDecision {
        hausdorff: witness.is_none(),
        witness,
        kernel_generators: kernel.iter().map(|x| render(x)).collect(),
    })
}

/// Whether `target` lies in the GF(2) span of `columns`.
fn gf2_in_span(columns: &[Vec<u8>], target: &[u8]) -> bool {
    let n = target.len();
    let mut basis: Vec<Vec<u8>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    let reduce = |v: &mut Vec<u8>, basis: &[Vec<u8>], pivots: &[usize]| {
        for (b, &p) in basis.iter().zip(pivots) {
            if v[p] == 1 {
                for i in 0..n {
                    v[i] ^= b[i];
                }
            }
        }
    };
    for c in columns {
        let mut v: Vec<u8> = c.iter().map(|x| x % 2).collect();
        reduce(&mut v, &basis, &pivots);
        if let Some(p) = v.iter().position(|&x| x == 1) {
            // keep the basis reduced at the new pivot
            for b in basis.iter_mut() {
                if b[p] == 1 {
                    for i in 0..n {
                        b[i] ^= v[i];
                    }
                }
            }
            basis.push(v);
            pivots.push(p);
        }
    }
    let mut t: Vec<u8> = target.iter().map(|x| x % 2).collect();
    reduce(&mut t, &basis, &pivots);
    t.iter().all(|&x| x == 0)
}

/// A coorientation double cover exists iff `η ∈ im(i* : H¹(M;ℤ/2) → H¹(D;ℤ/2))`.
/// `i_pullback` has one row per basis element of `H¹(D;ℤ/2)`.
pub fn double_cover_exists(i_pullback: &[Vec<u8>], eta_class: &[u8]) -> Result<bool, TopologyError> {
    if i_pullback.len() != eta_class.len() {
        return Err(TopologyError::DimensionMismatch {
            what: "i_pullback rows".into(),
            expected: eta_class.len(),
            got: i_pullback.len(),
        });
    }
    let m = i_pullback.first().map_or(0, |r| r.len());
    if i_pullback.iter().any(|r| r.len() != m) {
        return Err(TopologyError::DimensionMismatch { what: "i_pullback row length".into(), expected: m, got: 0 });
    }
    let columns: Vec<Vec<u8>> = (0..m).map(|j| i_pullback.iter().map(|r| r[j]).collect()).collect();
    Ok(gf2_in_span(&columns, eta_class))
}
