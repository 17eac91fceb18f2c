use crate::error::{CoreError, Result};

/// Cell-centered discretization of the rectangle `[0, lx] x [0, ly]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub lx: f64,
    pub ly: f64,
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
}

impl Grid {
    pub fn new(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(lx.is_finite() && ly.is_finite() && lx > 0.0 && ly > 0.0) {
            return Err(CoreError::InvalidGrid(format!(
                "side lengths must be positive and finite, got ({lx}, {ly})"
            )));
        }
        if nx < 4 || ny < 4 {
            return Err(CoreError::InvalidGrid(format!(
                "resolution too low: need at least 4 cells per axis, got {nx} x {ny}"
            )));
        }
        Ok(Self {
            lx,
            ly,
            nx,
            ny,
            hx: lx / nx as f64,
            hy: ly / ny as f64,
        })
    }

    /// Quadrature weight attached to every cell.
    pub fn cell_area(&self) -> f64 {
        self.hx * self.hy
    }

    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.ny, self.nx)
    }

    pub fn x(&self, ix: usize) -> f64 {
        (ix as f64 + 0.5) * self.hx
    }

    pub fn y(&self, iy: usize) -> f64 {
        (iy as f64 + 0.5) * self.hy
    }

    /// Same rectangle with every axis refined by `factor`.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.lx, self.ly, self.nx * factor, self.ny * factor)
    }
}

/// Builds a grid, rejecting non-positive sizes and fewer than four cells per axis.
pub fn build_grid(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Grid> {
    Grid::new(lx, ly, nx, ny)
}
