use super::calculus::{Calculus, NeumannLaplacian};
use super::field::{ScalarField, VectorField};
use super::grid::Grid;
use super::stokes::StokesModes;
use crate::error::{CoreError, Result};
use ndarray::Array2;
use std::sync::Arc;

/// Eigenvalues at or below this magnitude count as zero.
pub const ZERO_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectrumKind {
    NeumannLaplacian,
    Stokes,
}

#[derive(Clone, Debug)]
pub(crate) enum Modes {
    /// Products of cosines, listed as `(k, j)` = (y index, x index).
    Cosine { calculus: Calculus, index: Vec<(usize, usize)> },
    Stokes(Arc<StokesModes>),
}

/// The lowest eigenpairs of a discrete operator, eigenvalues of `-L` in
/// nondecreasing order, eigenvectors orthonormal for the quadrature product.
#[derive(Clone, Debug)]
pub struct OperatorSpectrum {
    pub kind: SpectrumKind,
    pub grid: Grid,
    pub eigenvalues: Vec<f64>,
    pub gap: f64,
    pub(crate) modes: Modes,
}

impl OperatorSpectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Eigenvector `i` of a Neumann spectrum.
    pub fn scalar_mode(&self, i: usize) -> Option<ScalarField> {
        match &self.modes {
            Modes::Cosine { calculus, index } => {
                let (k, j) = *index.get(i)?;
                let g = self.grid;
                let w = 1.0 / g.cell_area().sqrt();
                let cx = calculus.bx.cos.column(j);
                let cy = calculus.by.cos.column(k);
                let values = Array2::from_shape_fn(g.shape(), |(iy, ix)| w * cy[iy] * cx[ix]);
                Some(ScalarField { grid: g, values })
            }
            Modes::Stokes(_) => None,
        }
    }

    /// Eigenvector `i` of a Stokes spectrum.
    pub fn vector_mode(&self, i: usize) -> Option<VectorField> {
        match &self.modes {
            Modes::Stokes(m) => m.mode_field(i),
            Modes::Cosine { .. } => None,
        }
    }

    pub(crate) fn cosine_index(&self) -> Option<(&Calculus, &[(usize, usize)])> {
        match &self.modes {
            Modes::Cosine { calculus, index } => Some((calculus, index)),
            Modes::Stokes(_) => None,
        }
    }

    pub(crate) fn stokes_modes(&self) -> Option<&Arc<StokesModes>> {
        match &self.modes {
            Modes::Stokes(m) => Some(m),
            Modes::Cosine { .. } => None,
        }
    }
}

pub(crate) fn first_gap(values: &[f64]) -> f64 {
    values.iter().copied().find(|&v| v > ZERO_TOL).unwrap_or(f64::NAN)
}

/// The `kmax` smallest eigenpairs of the Neumann Laplacian.
///
/// The discrete operator is diagonal in the cosine-product basis, so the pairs
/// come out in closed form: eigenvalue `(j pi/lx)^2 + (k pi/ly)^2`.
pub fn neumann_spectrum(op: &NeumannLaplacian, kmax: usize) -> Result<OperatorSpectrum> {
    let g = op.grid();
    if kmax == 0 || kmax > g.len() {
        return Err(CoreError::InvalidArgument(format!(
            "kmax must lie in 1..={}, got {kmax}",
            g.len()
        )));
    }
    let c = &op.calculus;
    let mut all: Vec<(f64, usize, usize)> = Vec::with_capacity(g.len());
    for k in 0..g.ny {
        for j in 0..g.nx {
            let wx = c.bx.wave[j];
            let wy = c.by.wave[k];
            all.push((wx * wx + wy * wy, k, j));
        }
    }
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    all.truncate(kmax);
    let eigenvalues: Vec<f64> = all.iter().map(|e| e.0).collect();
    let index = all.iter().map(|e| (e.1, e.2)).collect();
    let gap = first_gap(&eigenvalues);
    Ok(OperatorSpectrum {
        kind: SpectrumKind::NeumannLaplacian,
        grid: g,
        eigenvalues,
        gap,
        modes: Modes::Cosine { calculus: c.clone(), index },
    })
}
