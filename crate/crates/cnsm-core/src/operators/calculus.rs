//! Gradient, divergence, Laplacians and the Leray projection.

use super::basis::{basis, Basis1d};
use super::field::{ScalarField, VectorField};
use super::grid::Grid;
use crate::error::{CoreError, Result};
use ndarray::{s, Array2};
use std::sync::Arc;

/// Divergence tolerance for fields flagged solenoidal.
pub const DIV_TOL: f64 = 1e-10;

/// Differential operators on one grid.
///
/// The gradient sends cosine modes to sine modes and the divergence is its
/// negative transpose, so `divergence(gradient(f))` is the Neumann Laplacian and
/// `<grad f, w> = -<f, div w>` holds for every `w`.
#[derive(Clone, Debug)]
pub struct Calculus {
    pub grid: Grid,
    pub bx: Arc<Basis1d>,
    pub by: Arc<Basis1d>,
}

impl Calculus {
    pub fn new(grid: Grid) -> Self {
        Self { grid, bx: basis(grid.nx, grid.lx), by: basis(grid.ny, grid.ly) }
    }

    fn check(&self, g: &Grid) -> Result<()> {
        if *g == self.grid {
            Ok(())
        } else {
            Err(CoreError::GridMismatch)
        }
    }

    pub fn gradient(&self, f: &ScalarField) -> Result<VectorField> {
        self.check(&f.grid)?;
        Ok(self.gradient_raw(&f.values))
    }

    pub(crate) fn gradient_raw(&self, f: &Array2<f64>) -> VectorField {
        VectorField { grid: self.grid, x: f.dot(&self.bx.deriv.t()), y: self.by.deriv.dot(f) }
    }

    pub fn divergence(&self, w: &VectorField) -> Result<ScalarField> {
        self.check(&w.grid)?;
        Ok(self.divergence_raw(w))
    }

    pub(crate) fn divergence_raw(&self, w: &VectorField) -> ScalarField {
        let mut v = w.x.dot(&self.bx.deriv);
        v += &self.by.deriv.t().dot(&w.y);
        v.mapv_inplace(|a| -a);
        ScalarField { grid: self.grid, values: v }
    }

    /// Neumann Laplacian in flux form, `sum_j K_ij (f_j - f_i)` along each axis,
    /// so constants map to exactly zero.
    pub fn laplacian(&self, f: &ScalarField) -> Result<ScalarField> {
        self.check(&f.grid)?;
        let (ny, nx) = self.grid.shape();
        let kx = &self.bx.neumann;
        let ky = &self.by.neumann;
        let v = &f.values;
        let mut out = Array2::zeros((ny, nx));
        for iy in 0..ny {
            for ix in 0..nx {
                let fi = v[[iy, ix]];
                let mut acc = 0.0;
                for jx in 0..nx {
                    if jx != ix {
                        acc += kx[[ix, jx]] * (v[[iy, jx]] - fi);
                    }
                }
                for jy in 0..ny {
                    if jy != iy {
                        acc += ky[[iy, jy]] * (v[[jy, ix]] - fi);
                    }
                }
                out[[iy, ix]] = acc;
            }
        }
        Ok(ScalarField { grid: self.grid, values: out })
    }

    /// Component-wise Dirichlet (no-slip) vector Laplacian.
    pub fn dirichlet_laplacian(&self, w: &VectorField) -> Result<VectorField> {
        self.check(&w.grid)?;
        let kx = &self.bx.dirichlet;
        let ky = &self.by.dirichlet;
        let x = w.x.dot(&kx.t()) + ky.dot(&w.x);
        let y = w.y.dot(&kx.t()) + ky.dot(&w.y);
        Ok(VectorField { grid: self.grid, x, y })
    }

    /// Coefficients of the x-component in the sine(x) cosine(y) basis and the
    /// y-component in the cosine(x) sine(y) basis; both arrays are `[k, j]`.
    pub fn velocity_coeffs(&self, w: &VectorField) -> (Array2<f64>, Array2<f64>) {
        let a = self.by.cos.t().dot(&w.x.dot(&self.bx.sin));
        let b = self.by.sin.t().dot(&w.y.dot(&self.bx.cos));
        (a, b)
    }

    pub fn velocity_from_coeffs(&self, a: &Array2<f64>, b: &Array2<f64>) -> VectorField {
        let x = self.by.cos.dot(&a.dot(&self.bx.sin.t()));
        let y = self.by.sin.dot(&b.dot(&self.bx.cos.t()));
        VectorField { grid: self.grid, x, y }
    }

    /// Orthogonal projection onto discretely divergence-free fields.
    pub fn leray_project(&self, w: &VectorField) -> Result<VectorField> {
        self.check(&w.grid)?;
        let (a, b) = self.velocity_coeffs(w);
        let (pa, pb) = self.project_coeffs(&a, &b);
        Ok(self.velocity_from_coeffs(&pa, &pb))
    }

    pub(crate) fn project_coeffs(&self, a: &Array2<f64>, b: &Array2<f64>) -> (Array2<f64>, Array2<f64>) {
        let (ny, nx) = self.grid.shape();
        let mut pa = Array2::zeros((ny, nx));
        let mut pb = Array2::zeros((ny, nx));
        for k in 1..ny {
            let ky = self.by.wave[k];
            for j in 1..nx {
                let kx = self.bx.wave[j];
                let c = (a[[k, j - 1]] * ky - b[[k - 1, j]] * kx) / (kx * kx + ky * ky);
                pa[[k, j - 1]] = c * ky;
                pb[[k - 1, j]] = -c * kx;
            }
        }
        // Highest sine modes carry no divergence and are kept as they are.
        pa.slice_mut(s![.., nx - 1]).assign(&a.slice(s![.., nx - 1]));
        pb.slice_mut(s![ny - 1, ..]).assign(&b.slice(s![ny - 1, ..]));
        (pa, pb)
    }

    /// Cosine-cosine coefficients `[k, j]` of a scalar field.
    pub fn cos_coeffs(&self, f: &Array2<f64>) -> Array2<f64> {
        self.by.cos.t().dot(&f.dot(&self.bx.cos))
    }

    pub fn from_cos_coeffs(&self, c: &Array2<f64>) -> Array2<f64> {
        self.by.cos.dot(&c.dot(&self.bx.cos.t()))
    }

    /// Largest cellwise |divergence|.
    pub fn max_divergence(&self, w: &VectorField) -> Result<f64> {
        Ok(self.divergence(w)?.max_abs())
    }
}

/// Matrix-free Neumann Laplacian on a grid.
#[derive(Clone, Debug)]
pub struct NeumannLaplacian {
    pub calculus: Calculus,
}

impl NeumannLaplacian {
    pub fn grid(&self) -> Grid {
        self.calculus.grid
    }

    pub fn apply(&self, f: &ScalarField) -> Result<ScalarField> {
        self.calculus.laplacian(f)
    }

    /// Dense matrix acting on row-major cell vectors (index `iy * nx + ix`).
    pub fn dense(&self) -> Array2<f64> {
        let g = self.grid();
        let (ny, nx) = (g.ny, g.nx);
        let kx = &self.calculus.bx.neumann;
        let ky = &self.calculus.by.neumann;
        let n = nx * ny;
        let mut m = Array2::zeros((n, n));
        for iy in 0..ny {
            for ix in 0..nx {
                let r = iy * nx + ix;
                for jx in 0..nx {
                    if jx != ix {
                        m[[r, iy * nx + jx]] += kx[[ix, jx]];
                    }
                }
                for jy in 0..ny {
                    if jy != iy {
                        m[[r, jy * nx + ix]] += ky[[iy, jy]];
                    }
                }
                let off: f64 = m.row(r).sum();
                m[[r, r]] = -off;
            }
        }
        m
    }
}

pub fn neumann_laplacian(grid: Grid) -> NeumannLaplacian {
    NeumannLaplacian { calculus: Calculus::new(grid) }
}

pub fn gradient(f: &ScalarField) -> VectorField {
    Calculus::new(f.grid).gradient_raw(&f.values)
}

pub fn divergence(w: &VectorField) -> ScalarField {
    Calculus::new(w.grid).divergence_raw(w)
}

pub fn leray_project(w: &VectorField) -> VectorField {
    let c = Calculus::new(w.grid);
    let (a, b) = c.velocity_coeffs(w);
    let (pa, pb) = c.project_coeffs(&a, &b);
    c.velocity_from_coeffs(&pa, &pb)
}
