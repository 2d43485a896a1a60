//! Exact algebra over ℤ and ℤ/2: Smith normal form, homology presentations,
//! signed permutations, monodromy, and the two Hausdorff decisions.

use thiserror::Error;

pub mod fixture;
pub mod homology;
pub mod monodromy;
pub mod signed;
pub mod snf;

pub use homology::{
    double_cover_exists, hausdorff_smooth_decision, kernel_generators, HomologyPresentation, IntHom, SmoothDecision,
};
pub use monodromy::{hausdorff_nc_decision, MonodromyRep, NcDecision, Stratum, Word};
pub use signed::{
    all_signed_permutations, conjugate, covering_isotropy, semidirect_mul, twist_group, FiberIsotropy,
    IsotropyDescriptor, SignedPermutation, TwistElement, TwistGroup,
};
pub use snf::{smith_normal_form, IntMatrix, Smith};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopologyError {
    #[error("{what}: expected size {expected}, got {got}")]
    DimensionMismatch { what: String, expected: usize, got: usize },
    #[error("malformed presentation: {0}")]
    MalformedPresentation(String),
    #[error("k = {k} exceeds the enumeration limit {max}")]
    KTooLarge { k: usize, max: usize },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("malformed word `{0}`")]
    MalformedWord(String),
    #[error("arrows do not compose: endpoints differ by {gap:e}")]
    EndpointMismatch { gap: f64 },
    #[error("arrows lie over strata of different depth ({left} and {right})")]
    StratumMismatch { left: usize, right: usize },
    #[error("torus coordinate {index} is zero")]
    ZeroCoordinate { index: usize },
}

pub use crate::groupoid::twisted::kappa_restrict;
