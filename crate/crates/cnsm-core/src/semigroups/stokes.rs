//! Stokes semigroup `e^{-tA}` on the retained Stokes eigenvectors.

use super::heat::check_time;
use super::modal::Propagator;
use crate::error::{CoreError, Result};
use crate::linalg::matmul;
use crate::operators::{OperatorSpectrum, StokesModes, VectorField, DIV_TOL};
use ndarray::{s, Array1, Array2};
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct StokesEngine {
    spectrum: OperatorSpectrum,
    modes: Arc<StokesModes>,
    /// Block-concatenated decay rates (the internal coefficient order).
    rates: Vec<f64>,
    offsets: Vec<usize>,
}

impl StokesEngine {
    pub fn new(spectrum: OperatorSpectrum) -> Result<Self> {
        let modes = spectrum
            .stokes_modes()
            .cloned()
            .ok_or_else(|| CoreError::InvalidArgument("Stokes engine needs a Stokes spectrum".into()))?;
        let mut rates = Vec::with_capacity(spectrum.len());
        let mut offsets = Vec::with_capacity(modes.blocks.len() + 1);
        for b in &modes.blocks {
            offsets.push(rates.len());
            rates.extend_from_slice(&b.values);
        }
        offsets.push(rates.len());
        Ok(Self { spectrum, modes, rates, offsets })
    }

    pub fn spectrum(&self) -> &OperatorSpectrum {
        &self.spectrum
    }

    pub fn kmax(&self) -> usize {
        self.rates.len()
    }

    pub fn gap(&self) -> f64 {
        self.spectrum.gap
    }

    fn check_grid(&self, u: &VectorField) -> Result<()> {
        if u.grid == self.modes.calculus.grid {
            Ok(())
        } else {
            Err(CoreError::GridMismatch)
        }
    }

    /// `e^{-tA} u` for a divergence-free `u`.
    pub fn stokes_apply(&self, t: f64, u: &VectorField) -> Result<VectorField> {
        check_time(t, false)?;
        self.check_grid(u)?;
        let div = self.modes.calculus.max_divergence(u)?;
        if div > DIV_TOL {
            return Err(CoreError::NotSolenoidal(div));
        }
        Ok(self.from_modes(&self.evolve(&self.to_modes(u), t, 0.0)))
    }

    /// `e^{-tA} P f` for arbitrary `f`. The retained modes are divergence-free,
    /// so their coefficients of `f` and of `P f` coincide.
    pub fn stokes_forced_apply(&self, t: f64, f: &VectorField) -> Result<VectorField> {
        check_time(t, true)?;
        self.check_grid(f)?;
        Ok(self.from_modes(&self.evolve(&self.to_modes(f), t, 0.0)))
    }

    /// `e^{-tA} u` at several times for a divergence-free `u`.
    pub fn stokes_apply_many(&self, times: &[f64], u: &VectorField) -> Result<Vec<VectorField>> {
        self.check_grid(u)?;
        let div = self.modes.calculus.max_divergence(u)?;
        if div > DIV_TOL {
            return Err(CoreError::NotSolenoidal(div));
        }
        for &t in times {
            check_time(t, false)?;
        }
        Ok(self.evolve_many(times, u))
    }

    /// `e^{-tA} P f` at several times.
    pub fn stokes_forced_apply_many(&self, times: &[f64], f: &VectorField) -> Result<Vec<VectorField>> {
        self.check_grid(f)?;
        for &t in times {
            check_time(t, true)?;
        }
        Ok(self.evolve_many(times, f))
    }

    /// One projection onto the modes, then one matrix product per block for all times.
    fn evolve_many(&self, times: &[f64], f: &VectorField) -> Vec<VectorField> {
        let g = self.modes.calculus.grid;
        let (ny, nx) = g.shape();
        let c = self.to_modes(f);
        let mut a = vec![Array2::zeros((ny, nx)); times.len()];
        let mut b = vec![Array2::zeros((ny, nx)); times.len()];
        for (bi, block) in self.modes.blocks.iter().enumerate() {
            if block.values.is_empty() {
                continue;
            }
            let off = self.offsets[bi];
            let coeffs = Array2::from_shape_fn((block.values.len(), times.len()), |(i, j)| {
                c[off + i] * (-self.rates[off + i] * times[j]).exp()
            });
            let z = matmul(&block.vectors, &coeffs);
            for j in 0..times.len() {
                block.scatter(&z.column(j).to_owned(), &mut a[j], &mut b[j], nx, ny);
            }
        }
        a.iter().zip(&b).map(|(a, b)| self.modes.calculus.velocity_from_coeffs(a, b)).collect()
    }

    /// Relative L2 energy of `P u` outside the retained modes.
    pub fn tail_energy(&self, u: &VectorField) -> Result<f64> {
        self.check_grid(u)?;
        let pu = self.modes.calculus.leray_project(u)?;
        let norm = pu.dot(&pu).sqrt();
        if norm == 0.0 {
            return Ok(0.0);
        }
        let rest = &pu - &self.from_modes(&self.to_modes(&pu));
        Ok(rest.dot(&rest).sqrt() / norm)
    }
}

impl Propagator for StokesEngine {
    type Field = VectorField;

    fn rates(&self) -> &[f64] {
        &self.rates
    }

    fn to_modes(&self, u: &VectorField) -> Array1<f64> {
        let g = self.modes.calculus.grid;
        let (a, b) = self.modes.calculus.velocity_coeffs(u);
        let mut out = Array1::zeros(self.rates.len());
        for (bi, block) in self.modes.blocks.iter().enumerate() {
            if block.values.is_empty() {
                continue;
            }
            let z = block.gather(&a, &b, g.nx, g.ny);
            out.slice_mut(s![self.offsets[bi]..self.offsets[bi + 1]]).assign(&block.vectors.t().dot(&z));
        }
        out
    }

    fn from_modes(&self, c: &Array1<f64>) -> VectorField {
        let g = self.modes.calculus.grid;
        let (ny, nx) = g.shape();
        let mut a = Array2::zeros((ny, nx));
        let mut b = Array2::zeros((ny, nx));
        for (bi, block) in self.modes.blocks.iter().enumerate() {
            if block.values.is_empty() {
                continue;
            }
            let z = block.vectors.dot(&c.slice(s![self.offsets[bi]..self.offsets[bi + 1]]));
            block.scatter(&z, &mut a, &mut b, nx, ny);
        }
        self.modes.calculus.velocity_from_coeffs(&a, &b)
    }
}
