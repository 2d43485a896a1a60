//! Chart-level models of Lie groupoids integrating elliptic tangent
//! bundles, with numerical verification suites and exact decision
//! procedures for Hausdorff integrability.

pub mod divisor;
pub mod geometry;
pub mod groupoid;
pub mod report;
pub mod rng;
pub mod topology;
pub mod verify;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");
