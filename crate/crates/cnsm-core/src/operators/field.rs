use super::grid::Grid;
use crate::error::{CoreError, Result};
use ndarray::{Array2, Zip};
use std::ops::{Add, Mul, Sub};

/// Cell values of a scalar function, stored as `values[[iy, ix]]` (row-major, rows along y).
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub grid: Grid,
    pub values: Array2<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Array2<f64>) -> Result<Self> {
        if values.dim() != grid.shape() {
            return Err(CoreError::InvalidArgument(format!(
                "field shape {:?} does not match grid {:?}",
                values.dim(),
                grid.shape()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::InvalidArgument("field has non-finite values".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: Array2::zeros(grid.shape()) }
    }

    pub fn constant(grid: Grid, k: f64) -> Self {
        Self { grid, values: Array2::from_elem(grid.shape(), k) }
    }

    /// Samples `f(x, y)` at the cell centers.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = Array2::from_shape_fn(grid.shape(), |(iy, ix)| f(grid.x(ix), grid.y(iy)));
        Self { grid, values }
    }

    pub fn integral(&self) -> f64 {
        self.values.sum() * self.grid.cell_area()
    }

    pub fn mean(&self) -> f64 {
        self.values.sum() / self.grid.len() as f64
    }

    /// Quadrature inner product.
    pub fn dot(&self, other: &ScalarField) -> f64 {
        Zip::from(&self.values).and(&other.values).fold(0.0, |acc, a, b| acc + a * b)
            * self.grid.cell_area()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn shifted(&self, c: f64) -> Self {
        Self { grid: self.grid, values: &self.values + c }
    }

    pub fn centered(&self) -> Self {
        self.shifted(-self.mean())
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { grid: self.grid, values: &self.values * s }
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &ScalarField) -> Self {
        let mut values = self.values.clone();
        values.scaled_add(s, &other.values);
        Self { grid: self.grid, values }
    }

    /// Pointwise map.
    pub fn mapped(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, values: self.values.mapv(f) }
    }

    /// Pointwise product.
    pub fn mul(&self, other: &ScalarField) -> Self {
        Self { grid: self.grid, values: &self.values * &other.values }
    }

    pub fn same_grid(&self, other: &ScalarField) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(CoreError::GridMismatch)
        }
    }
}

impl Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: &ScalarField) -> ScalarField {
        ScalarField { grid: self.grid, values: &self.values + &rhs.values }
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: &ScalarField) -> ScalarField {
        ScalarField { grid: self.grid, values: &self.values - &rhs.values }
    }
}

impl Mul<f64> for &ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: f64) -> ScalarField {
        self.scaled(rhs)
    }
}

/// Two-component field on a grid; both planes use the scalar layout.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub grid: Grid,
    pub x: Array2<f64>,
    pub y: Array2<f64>,
}

impl VectorField {
    pub fn new(grid: Grid, x: Array2<f64>, y: Array2<f64>) -> Result<Self> {
        if x.dim() != grid.shape() || y.dim() != grid.shape() {
            return Err(CoreError::InvalidArgument("component shape does not match grid".into()));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(CoreError::InvalidArgument("field has non-finite values".into()));
        }
        Ok(Self { grid, x, y })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, x: Array2::zeros(grid.shape()), y: Array2::zeros(grid.shape()) }
    }

    pub fn constant(grid: Grid, kx: f64, ky: f64) -> Self {
        Self {
            grid,
            x: Array2::from_elem(grid.shape(), kx),
            y: Array2::from_elem(grid.shape(), ky),
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> (f64, f64)) -> Self {
        let mut x = Array2::zeros(grid.shape());
        let mut y = Array2::zeros(grid.shape());
        for iy in 0..grid.ny {
            for ix in 0..grid.nx {
                let (a, b) = f(grid.x(ix), grid.y(iy));
                x[[iy, ix]] = a;
                y[[iy, ix]] = b;
            }
        }
        Self { grid, x, y }
    }

    pub fn from_components(a: ScalarField, b: ScalarField) -> Result<Self> {
        a.same_grid(&b)?;
        Ok(Self { grid: a.grid, x: a.values, y: b.values })
    }

    pub fn component_x(&self) -> ScalarField {
        ScalarField { grid: self.grid, values: self.x.clone() }
    }

    pub fn component_y(&self) -> ScalarField {
        ScalarField { grid: self.grid, values: self.y.clone() }
    }

    pub fn dot(&self, other: &VectorField) -> f64 {
        let sx = Zip::from(&self.x).and(&other.x).fold(0.0, |acc, a, b| acc + a * b);
        let sy = Zip::from(&self.y).and(&other.y).fold(0.0, |acc, a, b| acc + a * b);
        (sx + sy) * self.grid.cell_area()
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> ScalarField {
        let values = Zip::from(&self.x).and(&self.y).map_collect(|a, b| a.hypot(*b));
        ScalarField { grid: self.grid, values }
    }

    pub fn max_abs(&self) -> f64 {
        self.x.iter().chain(self.y.iter()).fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(self.y.iter()).all(|v| v.is_finite())
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { grid: self.grid, x: &self.x * s, y: &self.y * s }
    }

    pub fn axpy(&self, s: f64, other: &VectorField) -> Self {
        let mut out = self.clone();
        out.x.scaled_add(s, &other.x);
        out.y.scaled_add(s, &other.y);
        out
    }

    /// Multiplies both components by a scalar field.
    pub fn times(&self, f: &ScalarField) -> Self {
        Self { grid: self.grid, x: &self.x * &f.values, y: &self.y * &f.values }
    }

    pub fn same_grid(&self, other: &VectorField) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(CoreError::GridMismatch)
        }
    }
}

impl Add for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: &VectorField) -> VectorField {
        VectorField { grid: self.grid, x: &self.x + &rhs.x, y: &self.y + &rhs.y }
    }
}

impl Sub for &VectorField {
    type Output = VectorField;
    fn sub(self, rhs: &VectorField) -> VectorField {
        VectorField { grid: self.grid, x: &self.x - &rhs.x, y: &self.y - &rhs.y }
    }
}

impl Mul<f64> for &VectorField {
    type Output = VectorField;
    fn mul(self, rhs: f64) -> VectorField {
        self.scaled(rhs)
    }
}
