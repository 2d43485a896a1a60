//! Numerical differential geometry on coordinate charts.
//!
//! Maps and forms are closures over `&[f64]`. Derivatives are central
//! differences; linear algebra goes through nalgebra's SVD.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Point = Vec<f64>;

type MapFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;
type Predicate = dyn Fn(&[f64]) -> bool + Send + Sync;
type FormFn = dyn Fn(&[f64], &[&[f64]]) -> Complex64 + Send + Sync;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("finite-difference stencil point {point:?} lies outside the domain")]
    StencilOutsideDomain { point: Vec<f64> },
    #[error("point {point:?} lies outside the domain")]
    OutsideDomain { point: Vec<f64> },
    #[error("non-finite value at {point:?}")]
    NonFiniteValue { point: Vec<f64> },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid tolerance profile: {0}")]
    InvalidProfile(String),
}

/// Step size and tolerances shared by every numerical check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceProfile {
    #[serde(rename = "fd_step")]
    pub h: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub subspace_tol: f64,
    pub curvature_budget: f64,
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        ToleranceProfile {
            h: 1e-5,
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            subspace_tol: 1e-6,
            curvature_budget: 1.0,
        }
    }
}

impl ToleranceProfile {
    pub fn new(
        h: f64,
        abs_tol: f64,
        rel_tol: f64,
        subspace_tol: f64,
        curvature_budget: f64,
    ) -> Result<Self, GeometryError> {
        let p = ToleranceProfile { h, abs_tol, rel_tol, subspace_tol, curvature_budget };
        p.validate()?;
        Ok(p)
    }

    /// The truncation error of a central difference is about `h²` times the
    /// third derivative; `abs_tol` must sit above that budget.
    pub fn validate(&self) -> Result<(), GeometryError> {
        let fields = [
            ("h", self.h),
            ("abs_tol", self.abs_tol),
            ("rel_tol", self.rel_tol),
            ("subspace_tol", self.subspace_tol),
            ("curvature_budget", self.curvature_budget),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(GeometryError::InvalidProfile(format!("{name} must be positive, got {v}")));
            }
        }
        if self.abs_tol <= self.h * self.h * self.curvature_budget {
            return Err(GeometryError::InvalidProfile(format!(
                "abs_tol {} must exceed h^2 * curvature_budget = {}",
                self.abs_tol,
                self.h * self.h * self.curvature_budget
            )));
        }
        Ok(())
    }

    pub fn with_abs_tol(mut self, tol: f64) -> Self {
        self.abs_tol = tol;
        self
    }

    pub fn with_subspace_tol(mut self, tol: f64) -> Self {
        self.subspace_tol = tol;
        self
    }
}

fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// A map `ℝ^m ⊇ U → ℝ^k` given by a closure and an open-domain predicate.
#[derive(Clone)]
pub struct SmoothMap {
    domain_dim: usize,
    codomain_dim: usize,
    f: Arc<MapFn>,
    domain: Arc<Predicate>,
}

impl fmt::Debug for SmoothMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SmoothMap(ℝ^{} → ℝ^{})", self.domain_dim, self.codomain_dim)
    }
}

impl SmoothMap {
    pub fn new<F>(domain_dim: usize, codomain_dim: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        SmoothMap { domain_dim, codomain_dim, f: Arc::new(f), domain: Arc::new(|_| true) }
    }

    pub fn with_domain<P>(mut self, pred: P) -> Self
    where
        P: Fn(&[f64]) -> bool + Send + Sync + 'static,
    {
        self.domain = Arc::new(pred);
        self
    }

    pub fn identity(n: usize) -> Self {
        SmoothMap::new(n, n, |p| p.to_vec())
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn codomain_dim(&self) -> usize {
        self.codomain_dim
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.domain_dim && all_finite(p) && (self.domain)(p)
    }

    pub fn eval(&self, p: &[f64]) -> Result<Vec<f64>, GeometryError> {
        if p.len() != self.domain_dim {
            return Err(GeometryError::DimensionMismatch { expected: self.domain_dim, got: p.len() });
        }
        if !all_finite(p) {
            return Err(GeometryError::NonFiniteValue { point: p.to_vec() });
        }
        if !(self.domain)(p) {
            return Err(GeometryError::OutsideDomain { point: p.to_vec() });
        }
        let v = (self.f)(p);
        if v.len() != self.codomain_dim {
            return Err(GeometryError::DimensionMismatch { expected: self.codomain_dim, got: v.len() });
        }
        if !all_finite(&v) {
            return Err(GeometryError::NonFiniteValue { point: p.to_vec() });
        }
        Ok(v)
    }

    /// `self ∘ inner`. The domain of the composite is the preimage of this
    /// map's domain.
    pub fn compose(&self, inner: &SmoothMap) -> SmoothMap {
        let outer = self.clone();
        let inner_f = inner.clone();
        let outer_d = self.clone();
        let inner_d = inner.clone();
        SmoothMap::new(inner.domain_dim, self.codomain_dim, move |p| match inner_f.eval(p) {
            Ok(q) => outer.eval(&q).unwrap_or_else(|_| vec![f64::NAN; outer.codomain_dim]),
            Err(_) => vec![f64::NAN; outer.codomain_dim],
        })
        .with_domain(move |p| inner_d.contains(p) && inner_d.eval(p).map(|q| outer_d.contains(&q)).unwrap_or(false))
    }
}

/// Central-difference Jacobian. Every stencil point must lie in the domain.
pub fn jacobian(f: &SmoothMap, p: &[f64], prof: &ToleranceProfile) -> Result<DMatrix<f64>, GeometryError> {
    let m = f.domain_dim();
    if p.len() != m {
        return Err(GeometryError::DimensionMismatch { expected: m, got: p.len() });
    }
    if !f.contains(p) {
        return Err(GeometryError::OutsideDomain { point: p.to_vec() });
    }
    let h = prof.h;
    let mut jac = DMatrix::zeros(f.codomain_dim(), m);
    let mut q = p.to_vec();
    for j in 0..m {
        q[j] = p[j] + h;
        if !f.contains(&q) {
            return Err(GeometryError::StencilOutsideDomain { point: q });
        }
        let plus = f.eval(&q)?;
        q[j] = p[j] - h;
        if !f.contains(&q) {
            return Err(GeometryError::StencilOutsideDomain { point: q });
        }
        let minus = f.eval(&q)?;
        q[j] = p[j];
        for i in 0..f.codomain_dim() {
            jac[(i, j)] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Right singular vectors of `m` with singular value below `tol`.
pub fn nullspace(m: &DMatrix<f64>, tol: f64) -> Vec<DVector<f64>> {
    let cols = m.ncols();
    if cols == 0 {
        return Vec::new();
    }
    // nalgebra's SVD only returns min(rows, cols) right vectors, so pad.
    let padded = if m.nrows() < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    (0..cols)
        .filter(|&i| svd.singular_values[i] < tol)
        .map(|i| v_t.row(i).transpose())
        .collect()
}

/// Orthonormal basis of the span of `vectors`, dropping directions whose
/// singular value is below `1e-9 · max(1, σ_max)`.
pub fn orthonormal_basis(vectors: &[DVector<f64>]) -> DMatrix<f64> {
    let Some(first) = vectors.first() else {
        return DMatrix::zeros(0, 0);
    };
    let n = first.len();
    let a = DMatrix::from_columns(vectors);
    let svd = a.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = 1e-9 * smax.max(1.0);
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > cut).collect();
    let mut q = DMatrix::zeros(n, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        q.set_column(c, &u.column(i));
    }
    q
}

/// Sine of the largest principal angle between two spans, or `None` when
/// the spans have different dimension.
pub fn largest_principal_angle(a: &[DVector<f64>], b: &[DVector<f64>]) -> Option<f64> {
    let qa = orthonormal_basis(a);
    let qb = orthonormal_basis(b);
    if qa.ncols() != qb.ncols() {
        return None;
    }
    if qa.ncols() == 0 {
        return Some(0.0);
    }
    if qa.nrows() != qb.nrows() {
        return None;
    }
    let resid = &qb - &qa * (qa.transpose() * &qb);
    let s = resid.svd(false, false).singular_values;
    Some(s.iter().cloned().fold(0.0, f64::max))
}

pub fn subspace_equal(a: &[DVector<f64>], b: &[DVector<f64>], tol: f64) -> bool {
    matches!(largest_principal_angle(a, b), Some(s) if s < tol)
}

/// Real or complex differential form evaluated on tangent vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FormKind {
    Real,
    Complex,
}

#[derive(Clone)]
pub struct FormField {
    degree: usize,
    dim: usize,
    kind: FormKind,
    f: Arc<FormFn>,
    domain: Arc<Predicate>,
}

impl fmt::Debug for FormField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FormField({:?} {}-form on ℝ^{})", self.kind, self.degree, self.dim)
    }
}

impl FormField {
    pub fn new<F>(degree: usize, dim: usize, kind: FormKind, f: F) -> Self
    where
        F: Fn(&[f64], &[&[f64]]) -> Complex64 + Send + Sync + 'static,
    {
        FormField { degree, dim, kind, f: Arc::new(f), domain: Arc::new(|_| true) }
    }

    pub fn with_domain<P>(mut self, pred: P) -> Self
    where
        P: Fn(&[f64]) -> bool + Send + Sync + 'static,
    {
        self.domain = Arc::new(pred);
        self
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> FormKind {
        self.kind
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim && all_finite(p) && (self.domain)(p)
    }

    pub fn eval(&self, p: &[f64], vectors: &[&[f64]]) -> Result<Complex64, GeometryError> {
        if p.len() != self.dim {
            return Err(GeometryError::DimensionMismatch { expected: self.dim, got: p.len() });
        }
        if vectors.len() != self.degree {
            return Err(GeometryError::DimensionMismatch { expected: self.degree, got: vectors.len() });
        }
        for v in vectors {
            if v.len() != self.dim {
                return Err(GeometryError::DimensionMismatch { expected: self.dim, got: v.len() });
            }
        }
        if !self.contains(p) {
            return Err(GeometryError::OutsideDomain { point: p.to_vec() });
        }
        let val = (self.f)(p, vectors);
        if !(val.re.is_finite() && val.im.is_finite()) {
            return Err(GeometryError::NonFiniteValue { point: p.to_vec() });
        }
        Ok(val)
    }

    /// Pointwise difference `self − other`.
    pub fn sub(&self, other: &FormField) -> FormField {
        let a = self.clone();
        let b = other.clone();
        let (da, db) = (self.clone(), other.clone());
        let kind = if self.kind == FormKind::Real && other.kind == FormKind::Real {
            FormKind::Real
        } else {
            FormKind::Complex
        };
        FormField::new(self.degree, self.dim, kind, move |p, v| {
            match (a.eval(p, v), b.eval(p, v)) {
                (Ok(x), Ok(y)) => x - y,
                _ => Complex64::new(f64::NAN, f64::NAN),
            }
        })
        .with_domain(move |p| da.contains(p) && db.contains(p))
    }

    /// `f*self` as a form on the domain of `f`, using numerical Jacobians.
    pub fn pulled_back(&self, f: &SmoothMap, prof: ToleranceProfile) -> FormField {
        let omega = self.clone();
        let map = f.clone();
        let (od, md) = (self.clone(), f.clone());
        FormField::new(self.degree, f.domain_dim(), self.kind, move |p, v| {
            pullback(&map, &omega, p, v, &prof).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
        })
        .with_domain(move |p| md.contains(p) && md.eval(p).map(|q| od.contains(&q)).unwrap_or(false))
    }

    /// Exterior product. Evaluates the shuffle sum, so keep degrees small.
    pub fn wedge(&self, other: &FormField) -> FormField {
        let (a, b) = (self.clone(), other.clone());
        let (da, db) = (self.clone(), other.clone());
        let (k, l) = (self.degree, other.degree);
        let kind = if self.kind == FormKind::Real && other.kind == FormKind::Real {
            FormKind::Real
        } else {
            FormKind::Complex
        };
        FormField::new(k + l, self.dim, kind, move |p, v| {
            let mut total = Complex64::new(0.0, 0.0);
            for (left, right, sign) in shuffles(k, l) {
                let lv: Vec<&[f64]> = left.iter().map(|&i| v[i]).collect();
                let rv: Vec<&[f64]> = right.iter().map(|&i| v[i]).collect();
                match (a.eval(p, &lv), b.eval(p, &rv)) {
                    (Ok(x), Ok(y)) => total += x * y * sign,
                    _ => return Complex64::new(f64::NAN, f64::NAN),
                }
            }
            total
        })
        .with_domain(move |p| da.contains(p) && db.contains(p))
    }
}

/// (k,l)-shuffles of `0..k+l` with their signs.
fn shuffles(k: usize, l: usize) -> Vec<(Vec<usize>, Vec<usize>, f64)> {
    let n = k + l;
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let left: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let right: Vec<usize> = (0..n).filter(|i| mask & (1 << i) == 0).collect();
        // sign of the permutation left ++ right
        let mut inversions = 0;
        for &i in &left {
            inversions += right.iter().filter(|&&j| j < i).count();
        }
        let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
        out.push((left, right, sign));
    }
    out
}

/// `(f*ω)_p(v_1,…,v_k) = ω_{f(p)}(df v_1,…,df v_k)`.
pub fn pullback(
    f: &SmoothMap,
    omega: &FormField,
    p: &[f64],
    vectors: &[&[f64]],
    prof: &ToleranceProfile,
) -> Result<Complex64, GeometryError> {
    if omega.dim() != f.codomain_dim() {
        return Err(GeometryError::DimensionMismatch { expected: f.codomain_dim(), got: omega.dim() });
    }
    let jac = jacobian(f, p, prof)?;
    let q = f.eval(p)?;
    let pushed: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| {
            if v.len() != f.domain_dim() {
                return Err(GeometryError::DimensionMismatch { expected: f.domain_dim(), got: v.len() });
            }
            Ok((&jac * DVector::from_column_slice(v)).as_slice().to_vec())
        })
        .collect::<Result<_, _>>()?;
    let refs: Vec<&[f64]> = pushed.iter().map(|v| v.as_slice()).collect();
    omega.eval(&q, &refs)
}

/// `dω(v_0,…,v_k) = Σ_i (−1)^i v_i(ω(v_0,…,v̂_i,…,v_k))` for constant vector
/// fields, with central directional derivatives.
pub fn exterior_derivative(
    omega: &FormField,
    p: &[f64],
    vectors: &[&[f64]],
    prof: &ToleranceProfile,
) -> Result<Complex64, GeometryError> {
    let k = omega.degree();
    if vectors.len() != k + 1 {
        return Err(GeometryError::DimensionMismatch { expected: k + 1, got: vectors.len() });
    }
    if !omega.contains(p) {
        return Err(GeometryError::OutsideDomain { point: p.to_vec() });
    }
    let h = prof.h;
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..=k {
        let rest: Vec<&[f64]> = vectors.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| *v).collect();
        let vi = vectors[i];
        if vi.len() != p.len() {
            return Err(GeometryError::DimensionMismatch { expected: p.len(), got: vi.len() });
        }
        let plus: Vec<f64> = p.iter().zip(vi).map(|(x, d)| x + h * d).collect();
        let minus: Vec<f64> = p.iter().zip(vi).map(|(x, d)| x - h * d).collect();
        for q in [&plus, &minus] {
            if !omega.contains(q) {
                return Err(GeometryError::StencilOutsideDomain { point: q.clone() });
            }
        }
        let deriv = (omega.eval(&plus, &rest)? - omega.eval(&minus, &rest)?) / (2.0 * h);
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        total += deriv * sign;
    }
    Ok(total)
}

/// The 2-form `Σ c_{ij} dx_i∧dx_j` (i<j) evaluated on two vectors.
pub fn two_form_value(entries: &[(usize, usize, Complex64)], v1: &[f64], v2: &[f64]) -> Complex64 {
    entries.iter().fold(Complex64::new(0.0, 0.0), |acc, &(i, j, c)| acc + c * (v1[i] * v2[j] - v1[j] * v2[i]))
}

/// Real coordinates `[re_0, im_0, re_1, im_1, …]` read as complex numbers.
pub fn complex_coords(p: &[f64]) -> Vec<Complex64> {
    p.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect()
}

pub fn realify(zs: &[Complex64]) -> Vec<f64> {
    zs.iter().flat_map(|z| [z.re, z.im]).collect()
}

pub fn cx(p: &[f64], i: usize) -> Complex64 {
    Complex64::new(p[i], p[i + 1])
}

/// The holomorphic 2-form `Σ c_{ij} dz_i∧dz_j` on real-coordinate vectors,
/// where `dz_i(v) = v_{2i} + i·v_{2i+1}`.
pub fn holomorphic_two_form_value(entries: &[(usize, usize, Complex64)], v1: &[f64], v2: &[f64]) -> Complex64 {
    entries.iter().fold(Complex64::new(0.0, 0.0), |acc, &(i, j, c)| {
        let (a1, b1) = (cx(v1, 2 * i), cx(v1, 2 * j));
        let (a2, b2) = (cx(v2, 2 * i), cx(v2, 2 * j));
        acc + c * (a1 * b2 - b1 * a2)
    })
}

pub fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn prof() -> ToleranceProfile {
        ToleranceProfile::default()
    }

    #[test]
    fn jacobian_of_polynomial() {
        let f = SmoothMap::new(2, 2, |p| vec![p[0] * p[0] * p[1], p[0] + p[1].sin()]);
        let j = jacobian(&f, &[1.5, -0.3], &prof()).unwrap();
        assert!((j[(0, 0)] - 2.0 * 1.5 * -0.3).abs() < 1e-9);
        assert!((j[(0, 1)] - 2.25).abs() < 1e-9);
        assert!((j[(1, 0)] - 1.0).abs() < 1e-9);
        assert!((j[(1, 1)] - (-0.3f64).cos()).abs() < 1e-9);
    }

    #[test]
    fn stencil_must_stay_in_domain() {
        let f = SmoothMap::new(1, 1, |p| vec![p[0].ln()]).with_domain(|p| p[0] > 0.0);
        let err = jacobian(&f, &[5e-6], &prof()).unwrap_err();
        assert!(matches!(err, GeometryError::StencilOutsideDomain { .. }));
        assert!(jacobian(&f, &[1.0], &prof()).is_ok());
    }

    #[test]
    fn non_finite_values_are_errors() {
        let f = SmoothMap::new(1, 1, |p| vec![1.0 / p[0]]);
        assert!(matches!(f.eval(&[0.0]), Err(GeometryError::NonFiniteValue { .. })));
    }

    #[test]
    fn profile_rejects_tolerance_below_truncation_budget() {
        assert!(ToleranceProfile::new(1e-3, 1e-7, 1e-9, 1e-6, 1.0).is_err());
        assert!(ToleranceProfile::new(1e-5, 1e-9, 1e-9, 1e-6, 1.0).is_ok());
        assert!(ToleranceProfile::new(1e-5, -1.0, 1e-9, 1e-6, 1.0).is_err());
    }

    #[test]
    fn nullspace_of_wide_matrix() {
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let ns = nullspace(&m, 1e-10);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!((&m * v).norm() < 1e-12);
        }
    }

    #[test]
    fn principal_angles() {
        let e = |i: usize| {
            let mut v = DVector::zeros(3);
            v[i] = 1.0;
            v
        };
        let a = vec![e(0), e(1)];
        let b = vec![e(0) + e(1), e(0) - e(1)];
        assert!(subspace_equal(&a, &b, 1e-12));
        assert!(!subspace_equal(&a, &[e(0), e(2)], 0.5));
        assert_eq!(largest_principal_angle(&a, &[e(0)]), None);
        assert_eq!(largest_principal_angle(&[DVector::zeros(3)], &[]), Some(0.0));
    }

    #[test]
    fn wedge_of_one_forms() {
        let dx = FormField::new(1, 2, FormKind::Real, |_, v| Complex64::new(v[0][0], 0.0));
        let dy = FormField::new(1, 2, FormKind::Real, |_, v| Complex64::new(v[0][1], 0.0));
        let area = dx.wedge(&dy);
        let val = area.eval(&[0.0, 0.0], &[&[1.0, 0.0], &[0.0, 1.0]]).unwrap();
        assert_eq!(val.re, 1.0);
        let val = area.eval(&[0.0, 0.0], &[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert_eq!(val.re, -1.0);
    }

    #[test]
    fn exterior_derivative_of_x_dy() {
        // d(x dy) = dx∧dy
        let form = FormField::new(1, 2, FormKind::Real, |p, v| Complex64::new(p[0] * v[0][1], 0.0));
        let d = exterior_derivative(&form, &[0.3, 0.7], &[&[1.0, 0.0], &[0.0, 1.0]], &prof()).unwrap();
        assert!((d.re - 1.0).abs() < 1e-9);
    }

    #[test]
    fn pullback_of_area_by_polar_map() {
        // (r,θ) ↦ (r cos θ, r sin θ) pulls dx∧dy back to r dr∧dθ
        let polar = SmoothMap::new(2, 2, |p| vec![p[0] * p[1].cos(), p[0] * p[1].sin()]);
        let area = FormField::new(2, 2, FormKind::Real, |_, v| {
            Complex64::new(v[0][0] * v[1][1] - v[0][1] * v[1][0], 0.0)
        });
        let val = pullback(&polar, &area, &[2.0, 0.4], &[&[1.0, 0.0], &[0.0, 1.0]], &prof()).unwrap();
        assert!((val.re - 2.0).abs() < 1e-9);
    }

    fn cubic_map() -> SmoothMap {
        SmoothMap::new(3, 3, |p| vec![p[0] * p[1] + p[2], p[1] * p[1] * p[2], p[0] - p[2] * p[0] * p[0]])
    }

    fn quadratic_map() -> SmoothMap {
        SmoothMap::new(3, 3, |p| vec![p[0] + 0.5 * p[1] * p[2], p[1] - p[0] * p[0], 2.0 * p[2] + p[0] * p[1]])
    }

    fn sample_two_form() -> FormField {
        FormField::new(2, 3, FormKind::Real, |p, v| {
            let c = [p[0] * p[1], p[2] * p[2] + 1.0, p[0] - p[1] * p[2]];
            let m = [(0usize, 1usize), (0, 2), (1, 2)];
            let mut s = 0.0;
            for (k, &(i, j)) in m.iter().enumerate() {
                s += c[k] * (v[0][i] * v[1][j] - v[0][j] * v[1][i]);
            }
            Complex64::new(s, 0.0)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn chain_rule(p in prop::collection::vec(-1.0f64..1.0, 3)) {
            let (f, g) = (cubic_map(), quadratic_map());
            let fg = f.compose(&g);
            let lhs = jacobian(&fg, &p, &prof()).unwrap();
            let gp = g.eval(&p).unwrap();
            let rhs = jacobian(&f, &gp, &prof()).unwrap() * jacobian(&g, &p, &prof()).unwrap();
            prop_assert!((lhs - rhs).amax() < 1e-7);
        }

        #[test]
        fn d_squared_vanishes(p in prop::collection::vec(-1.0f64..1.0, 3)) {
            let prof = ToleranceProfile { h: 1e-4, ..prof() };
            let omega = FormField::new(1, 3, FormKind::Real, |p, v| {
                Complex64::new(p[1] * p[1] * v[0][0] + p[0] * p[2] * v[0][1] + (p[0] * p[1]).sin() * v[0][2], 0.0)
            });
            let inner = omega.clone();
            let d_omega = FormField::new(2, 3, FormKind::Real, move |p, v| {
                exterior_derivative(&inner, p, v, &prof).unwrap()
            });
            let e = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
            let dd = exterior_derivative(&d_omega, &p, &[&e[0], &e[1], &e[2]], &prof).unwrap();
            prop_assert!(dd.norm() < 1e-5);
        }

        #[test]
        fn pullback_is_functorial(p in prop::collection::vec(-1.0f64..1.0, 3)) {
            let (f, g) = (cubic_map(), quadratic_map());
            let omega = sample_two_form();
            let v1 = [0.3, -0.2, 0.9];
            let v2 = [-0.5, 0.4, 0.1];
            let direct = pullback(&f.compose(&g), &omega, &p, &[&v1, &v2], &prof()).unwrap();
            let stepwise = pullback(&g, &omega.pulled_back(&f, prof()), &p, &[&v1, &v2], &prof()).unwrap();
            prop_assert!((direct - stepwise).norm() < 1e-6);
        }

        #[test]
        fn nullspace_vectors_are_orthonormal(entries in prop::collection::vec(-2.0f64..2.0, 8)) {
            let m = DMatrix::from_row_slice(2, 4, &entries);
            let ns = nullspace(&m, 1e-9);
            prop_assert!(ns.len() >= 2);
            for (i, a) in ns.iter().enumerate() {
                prop_assert!((&m * a).norm() < 1e-9);
                for (j, b) in ns.iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((a.dot(b) - expect).abs() < 1e-12);
                }
            }
        }
    }
}
