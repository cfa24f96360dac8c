//! Real grid functions: scalar, three-component, and unit-sphere valued.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::TorusGrid;

/// Tolerance on ||u| - 1| accepted when building a [`SphereField`].
pub const SPHERE_TOL: f64 = 1e-12;

/// A real function sampled on a [`TorusGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Arc<TorusGrid>,
    values: Vec<f64>,
}

fn assert_same_grid(a: &Arc<TorusGrid>, b: &Arc<TorusGrid>) {
    assert!(Arc::ptr_eq(a, b) || a == b, "fields live on different grids");
}

impl ScalarField {
    /// Wraps values after checking length and finiteness.
    pub fn new(grid: Arc<TorusGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { grid, values })
    }

    /// Internal constructor for values produced by trusted arithmetic.
    pub(crate) fn from_raw(grid: Arc<TorusGrid>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: &Arc<TorusGrid>) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: &Arc<TorusGrid>, c: f64) -> Self {
        Self::from_raw(grid.clone(), vec![c; grid.len()])
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(grid: &Arc<TorusGrid>, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        Self::from_raw(grid.clone(), values)
    }

    pub fn grid(&self) -> &Arc<TorusGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_raw(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_same_grid(&self.grid, &other.grid);
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self::from_raw(self.grid.clone(), values)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// ∫ f dx by the rectangle rule.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_measure()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// ⟨f, g⟩ = Σ f g Δx.
    pub fn inner(&self, other: &Self) -> f64 {
        assert_same_grid(&self.grid, &other.grid);
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>()
            * self.grid.cell_measure()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// max |f - g|.
    pub fn max_diff(&self, other: &Self) -> f64 {
        assert_same_grid(&self.grid, &other.grid);
        self.values.iter().zip(&other.values).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// f - mean(f).
    pub fn without_mean(&self) -> Self {
        let m = self.mean();
        self.map(|v| v - m)
    }
}

impl Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: &ScalarField) -> ScalarField {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: &ScalarField) -> ScalarField {
        self.zip_with(rhs, |a, b| a - b)
    }
}

/// Pointwise product.
impl Mul for &ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: &ScalarField) -> ScalarField {
        self.zip_with(rhs, |a, b| a * b)
    }
}

impl Mul<&ScalarField> for f64 {
    type Output = ScalarField;
    fn mul(self, rhs: &ScalarField) -> ScalarField {
        rhs.scale(self)
    }
}

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.scale(-1.0)
    }
}

/// Three scalar fields on a shared grid, read as an ℝ³-valued map.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField3 {
    comps: [ScalarField; 3],
}

impl VectorField3 {
    pub fn new(comps: [ScalarField; 3]) -> Self {
        assert_same_grid(comps[0].grid(), comps[1].grid());
        assert_same_grid(comps[0].grid(), comps[2].grid());
        Self { comps }
    }

    pub fn zeros(grid: &Arc<TorusGrid>) -> Self {
        Self::constant(grid, [0.0; 3])
    }

    pub fn constant(grid: &Arc<TorusGrid>, q: [f64; 3]) -> Self {
        Self::new(q.map(|c| ScalarField::constant(grid, c)))
    }

    pub fn from_fn(grid: &Arc<TorusGrid>, f: impl Fn(&[f64]) -> [f64; 3]) -> Self {
        let pts: Vec<[f64; 3]> = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        Self::new(std::array::from_fn(|c| {
            ScalarField::from_raw(grid.clone(), pts.iter().map(|p| p[c]).collect())
        }))
    }

    pub fn grid(&self) -> &Arc<TorusGrid> {
        self.comps[0].grid()
    }

    pub fn comps(&self) -> &[ScalarField; 3] {
        &self.comps
    }

    pub fn comp(&self, i: usize) -> &ScalarField {
        &self.comps[i]
    }

    pub fn into_comps(self) -> [ScalarField; 3] {
        self.comps
    }

    /// Vector at flat position `i`.
    pub fn at(&self, i: usize) -> [f64; 3] {
        std::array::from_fn(|c| self.comps[c].values()[i])
    }

    pub fn map_comps(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self::new(std::array::from_fn(|c| f(&self.comps[c])))
    }

    pub fn zip_comps(&self, other: &Self, f: impl Fn(&ScalarField, &ScalarField) -> ScalarField) -> Self {
        Self::new(std::array::from_fn(|c| f(&self.comps[c], &other.comps[c])))
    }

    /// Applies `f` to the vectors at each point.
    pub fn map_points(&self, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let grid = self.grid().clone();
        let mut out = [vec![0.0; grid.len()], vec![0.0; grid.len()], vec![0.0; grid.len()]];
        for i in 0..grid.len() {
            let w = f(self.at(i));
            for c in 0..3 {
                out[c][i] = w[c];
            }
        }
        Self::new(out.map(|v| ScalarField::from_raw(grid.clone(), v)))
    }

    /// Applies `f` to pairs of vectors at each point.
    pub fn zip_points(&self, other: &Self, f: impl Fn([f64; 3], [f64; 3]) -> [f64; 3]) -> Self {
        assert_same_grid(self.grid(), other.grid());
        let grid = self.grid().clone();
        let mut out = [vec![0.0; grid.len()], vec![0.0; grid.len()], vec![0.0; grid.len()]];
        for i in 0..grid.len() {
            let w = f(self.at(i), other.at(i));
            for c in 0..3 {
                out[c][i] = w[c];
            }
        }
        Self::new(out.map(|v| ScalarField::from_raw(grid.clone(), v)))
    }

    /// Pointwise ⟨a, b⟩.
    pub fn dot(&self, other: &Self) -> ScalarField {
        let [a0, a1, a2] = &self.comps;
        let [b0, b1, b2] = &other.comps;
        &(&(a0 * b0) + &(a1 * b1)) + &(a2 * b2)
    }

    /// Pointwise a ∧ b.
    pub fn cross(&self, other: &Self) -> Self {
        self.zip_points(other, cross)
    }

    /// Pointwise Euclidean magnitude |a(x)|.
    pub fn magnitude(&self) -> ScalarField {
        self.dot(self).map(f64::sqrt)
    }

    /// Multiplies every component by the scalar field `s`.
    pub fn scale_by(&self, s: &ScalarField) -> Self {
        self.map_comps(|c| c * s)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map_comps(|f| f.scale(c))
    }

    /// Σ_i ⟨aⁱ, bⁱ⟩ over the grid.
    pub fn inner(&self, other: &Self) -> f64 {
        (0..3).map(|c| self.comps[c].inner(&other.comps[c])).sum()
    }

    /// L² norm of the vector field.
    pub fn l2_norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, c| m.max(c.max_abs()))
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        (0..3).fold(0.0, |m, c| m.max(self.comps[c].max_diff(&other.comps[c])))
    }

    pub fn integral(&self) -> [f64; 3] {
        std::array::from_fn(|c| self.comps[c].integral())
    }

    /// Applies a fixed 3×3 matrix at every point.
    pub fn rotate(&self, r: &[[f64; 3]; 3]) -> Self {
        self.map_points(|a| std::array::from_fn(|i| (0..3).map(|j| r[i][j] * a[j]).sum()))
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().all(|c| c.values().iter().all(|v| v.is_finite()))
    }
}

impl Add for &VectorField3 {
    type Output = VectorField3;
    fn add(self, rhs: &VectorField3) -> VectorField3 {
        self.zip_comps(rhs, |a, b| a + b)
    }
}

impl Sub for &VectorField3 {
    type Output = VectorField3;
    fn sub(self, rhs: &VectorField3) -> VectorField3 {
        self.zip_comps(rhs, |a, b| a - b)
    }
}

impl Neg for &VectorField3 {
    type Output = VectorField3;
    fn neg(self) -> VectorField3 {
        self.scale(-1.0)
    }
}

pub fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// A [`VectorField3`] with |u(x)| = 1 at every grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereField(VectorField3);

impl SphereField {
    /// Accepts `u` if max ||u| - 1| ≤ [`SPHERE_TOL`].
    pub fn new(u: VectorField3) -> Result<Self> {
        if !u.is_finite() {
            return Err(Error::NonFinite);
        }
        let dev = constraint_defect(&u);
        if dev > SPHERE_TOL {
            return Err(Error::NotOnSphere(dev));
        }
        Ok(Self(u))
    }

    /// Projects `u` pointwise onto the sphere. Fails where u vanishes.
    pub fn normalized(u: &VectorField3) -> Result<Self> {
        if (0..u.grid().len()).any(|i| dot3(u.at(i), u.at(i)) == 0.0) {
            return Err(Error::NotOnSphere(1.0));
        }
        Self::new(u.map_points(|a| {
            let n = dot3(a, a).sqrt();
            a.map(|c| c / n)
        }))
    }

    /// Constant map u ≡ Q (Q is normalized).
    pub fn constant(grid: &Arc<TorusGrid>, q: [f64; 3]) -> Result<Self> {
        let n = dot3(q, q).sqrt();
        Self::new(VectorField3::constant(grid, q.map(|c| c / n)))
    }

    pub(crate) fn from_raw(u: VectorField3) -> Self {
        Self(u)
    }

    pub fn as_vector(&self) -> &VectorField3 {
        &self.0
    }

    pub fn into_vector(self) -> VectorField3 {
        self.0
    }

    pub fn grid(&self) -> &Arc<TorusGrid> {
        self.0.grid()
    }

    /// max over the grid of ||u| - 1|.
    pub fn defect(&self) -> f64 {
        constraint_defect(&self.0)
    }
}

impl std::ops::Deref for SphereField {
    type Target = VectorField3;
    fn deref(&self) -> &VectorField3 {
        &self.0
    }
}

/// max over the grid of ||u(x)| - 1|.
pub fn constraint_defect(u: &VectorField3) -> f64 {
    (0..u.grid().len()).fold(0.0, |m, i| m.max((dot3(u.at(i), u.at(i)).sqrt() - 1.0).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Arc<TorusGrid> {
        Arc::new(TorusGrid::cubic(1, 16, 2.0 * PI).unwrap())
    }

    #[test]
    fn rejects_non_finite() {
        let g = grid();
        let mut v = vec![0.0; 16];
        v[3] = f64::NAN;
        assert!(matches!(ScalarField::new(g, v), Err(Error::NonFinite)));
    }

    #[test]
    fn integral_of_cos_squared() {
        let g = grid();
        let f = ScalarField::from_fn(&g, |x| x[0].cos());
        assert!((f.inner(&f) - PI).abs() < 1e-13);
        assert!(f.integral().abs() < 1e-13);
    }

    #[test]
    fn cross_and_dot_are_pointwise() {
        let g = grid();
        let a = VectorField3::from_fn(&g, |x| [x[0].cos(), x[0].sin(), 0.5]);
        let b = VectorField3::from_fn(&g, |x| [1.0, x[0], -x[0].sin()]);
        let c = a.cross(&b);
        assert!(c.dot(&a).max_abs() < 1e-14);
        assert!(c.dot(&b).max_abs() < 1e-13);
    }

    #[test]
    fn sphere_constraint_is_enforced() {
        let g = grid();
        let u = VectorField3::from_fn(&g, |x| [x[0].cos(), x[0].sin(), 0.0]);
        assert!(SphereField::new(u.clone()).is_ok());
        assert!(matches!(SphereField::new(u.scale(1.01)), Err(Error::NotOnSphere(_))));
        let n = SphereField::normalized(&u.scale(3.0)).unwrap();
        assert!(n.defect() < 1e-15);
        assert!(SphereField::normalized(&VectorField3::zeros(&g)).is_err());
    }
}
