//! Local models of elliptic divisors and their Lie algebroid frames.
//!
//! Coordinates on ℝⁿ are split into real coordinates and complex pairs
//! `z_j = (x_{2j}, x_{2j+1})`. The divisor is the union of the loci
//! `z_j = 0`, cut out by the ideal generated by `∏|z_j|²`.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DivisorError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid divisor layout: {0}")]
    InvalidLayout(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorLocalModel {
    n: usize,
    pairs: Vec<usize>,
    real_coords: Vec<usize>,
}

impl DivisorLocalModel {
    /// `ℝ^{n−2k} × ℂ^k` with the complex factors last.
    pub fn new(n: usize, k: usize) -> Result<Self, DivisorError> {
        if 2 * k > n {
            return Err(DivisorError::InvalidLayout(format!("2k = {} exceeds n = {n}", 2 * k)));
        }
        Self::with_pairs(n, (0..k).map(|j| n - 2 * k + 2 * j).collect())
    }

    /// Complex factors starting at the given real indices.
    pub fn with_pairs(n: usize, mut pairs: Vec<usize>) -> Result<Self, DivisorError> {
        pairs.sort_unstable();
        for w in pairs.windows(2) {
            if w[1] < w[0] + 2 {
                return Err(DivisorError::InvalidLayout(format!("overlapping pairs at {} and {}", w[0], w[1])));
            }
        }
        if let Some(&last) = pairs.last() {
            if last + 2 > n {
                return Err(DivisorError::InvalidLayout(format!("pair at {last} does not fit in ℝ^{n}")));
            }
        }
        let real_coords = (0..n).filter(|i| !pairs.iter().any(|&p| *i == p || *i == p + 1)).collect();
        Ok(DivisorLocalModel { n, pairs, real_coords })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[usize] {
        &self.pairs
    }

    pub fn real_coords(&self) -> &[usize] {
        &self.real_coords
    }

    fn check(&self, p: &[f64]) -> Result<(), DivisorError> {
        if p.len() != self.n {
            return Err(DivisorError::DimensionMismatch { expected: self.n, got: p.len() });
        }
        Ok(())
    }

    /// `∏|z_j|²`.
    pub fn ideal_generator(&self, p: &[f64]) -> Result<f64, DivisorError> {
        self.check(p)?;
        Ok(self.pairs.iter().map(|&i| p[i] * p[i] + p[i + 1] * p[i + 1]).product())
    }

    /// Number of complex factors vanishing at `p`.
    pub fn multiplicity(&self, p: &[f64]) -> Result<usize, DivisorError> {
        self.check(p)?;
        Ok(self.pairs.iter().filter(|&&i| p[i] == 0.0 && p[i + 1] == 0.0).count())
    }

    /// `∂_x` for each real coordinate, then `r_j∂_{r_j}` and `∂_{θ_j}` for
    /// each complex factor.
    pub fn algebroid_frame(&self, p: &[f64]) -> Result<Vec<DVector<f64>>, DivisorError> {
        self.check(p)?;
        let mut frame = Vec::with_capacity(self.n);
        for &i in &self.real_coords {
            let mut v = DVector::zeros(self.n);
            v[i] = 1.0;
            frame.push(v);
        }
        for &i in &self.pairs {
            let (x, y) = (p[i], p[i + 1]);
            let mut radial = DVector::zeros(self.n);
            radial[i] = x;
            radial[i + 1] = y;
            let mut angular = DVector::zeros(self.n);
            angular[i] = -y;
            angular[i + 1] = x;
            frame.push(radial);
            frame.push(angular);
        }
        Ok(frame)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResidueKind {
    /// `ℝ²` with divisor at the origin.
    Nonzero,
    /// `ℂ²` with divisor `u = 0`.
    Zero,
}

/// Frames of the two residue models.
///
/// Nonzero residue: `{r²∂_x, r²∂_y}` on ℝ². Zero residue: the real and
/// imaginary parts of `{u∂_u, u∂_v}` on ℂ² = ℝ⁴ ordered `(u, v)`.
pub fn residue_model_frame(kind: ResidueKind, p: &[f64]) -> Result<Vec<DVector<f64>>, DivisorError> {
    match kind {
        ResidueKind::Nonzero => {
            if p.len() != 2 {
                return Err(DivisorError::DimensionMismatch { expected: 2, got: p.len() });
            }
            let r2 = p[0] * p[0] + p[1] * p[1];
            Ok(vec![DVector::from_vec(vec![r2, 0.0]), DVector::from_vec(vec![0.0, r2])])
        }
        ResidueKind::Zero => {
            if p.len() != 4 {
                return Err(DivisorError::DimensionMismatch { expected: 4, got: p.len() });
            }
            let (ur, ui) = (p[0], p[1]);
            let mut frame = Vec::with_capacity(4);
            for slot in [0usize, 2] {
                // f∂_w realifies to (Re f, Im f); i·f∂_w to (−Im f, Re f).
                let mut v = DVector::zeros(4);
                v[slot] = ur;
                v[slot + 1] = ui;
                frame.push(v);
                let mut w = DVector::zeros(4);
                w[slot] = -ui;
                w[slot + 1] = ur;
                frame.push(w);
            }
            Ok(frame)
        }
    }
}
