//! Neumann heat semigroup `e^{t Laplacian}` in the cosine-product eigenbasis.

use super::modal::Propagator;
use crate::error::{CoreError, Result};
use crate::operators::{Calculus, OperatorSpectrum, ScalarField, SpectrumKind, VectorField};
use ndarray::{s, Array1, Array2};

#[derive(Clone, Debug)]
pub struct HeatEngine {
    spectrum: OperatorSpectrum,
    calculus: Calculus,
    /// Retained `(k, j)` cosine indices, in spectrum order.
    index: Vec<(usize, usize)>,
    /// Leading columns of the cosine bases that cover every retained index.
    cx: Array2<f64>,
    cy: Array2<f64>,
}

pub(crate) fn check_time(t: f64, strict: bool) -> Result<()> {
    if !t.is_finite() || t < 0.0 || (strict && t == 0.0) {
        let need = if strict { "t > 0" } else { "t >= 0" };
        return Err(CoreError::InvalidArgument(format!("time must satisfy {need}, got {t}")));
    }
    Ok(())
}

impl HeatEngine {
    pub fn new(spectrum: OperatorSpectrum) -> Result<Self> {
        let (calculus, index) = match spectrum.cosine_index() {
            Some((c, i)) if spectrum.kind == SpectrumKind::NeumannLaplacian => (c.clone(), i.to_vec()),
            _ => return Err(CoreError::InvalidArgument("heat engine needs a Neumann spectrum".into())),
        };
        let jx = index.iter().map(|e| e.1).max().unwrap_or(0) + 1;
        let ky = index.iter().map(|e| e.0).max().unwrap_or(0) + 1;
        let cx = calculus.bx.cos.slice(s![.., 0..jx]).to_owned();
        let cy = calculus.by.cos.slice(s![.., 0..ky]).to_owned();
        Ok(Self { spectrum, calculus, index, cx, cy })
    }

    pub fn spectrum(&self) -> &OperatorSpectrum {
        &self.spectrum
    }

    pub fn calculus(&self) -> &Calculus {
        &self.calculus
    }

    pub fn kmax(&self) -> usize {
        self.index.len()
    }

    pub fn gap(&self) -> f64 {
        self.spectrum.gap
    }

    fn check_grid(&self, f: &ScalarField) -> Result<()> {
        if f.grid == self.calculus.grid {
            Ok(())
        } else {
            Err(CoreError::GridMismatch)
        }
    }

    /// `e^{t Laplacian} w` over the retained modes.
    pub fn heat_apply(&self, t: f64, w: &ScalarField) -> Result<ScalarField> {
        check_time(t, false)?;
        self.check_grid(w)?;
        Ok(self.from_modes(&self.evolve(&self.to_modes(w), t, 0.0)))
    }

    /// `grad e^{t Laplacian} w`.
    pub fn heat_grad_apply(&self, t: f64, w: &ScalarField) -> Result<VectorField> {
        check_time(t, true)?;
        self.check_grid(w)?;
        let h = self.from_modes(&self.evolve(&self.to_modes(w), t, 0.0));
        self.calculus.gradient(&h)
    }

    /// `e^{t Laplacian} div w`, divergence taken first.
    pub fn heat_div_apply(&self, t: f64, w: &VectorField) -> Result<ScalarField> {
        check_time(t, true)?;
        let d = self.calculus.divergence(w)?;
        Ok(self.from_modes(&self.evolve(&self.to_modes(&d), t, 0.0)))
    }

    /// Relative L2 energy of `w` outside the retained modes.
    pub fn tail_energy(&self, w: &ScalarField) -> Result<f64> {
        self.check_grid(w)?;
        let norm = w.dot(w).sqrt();
        if norm == 0.0 {
            return Ok(0.0);
        }
        let rest = w - &self.from_modes(&self.to_modes(w));
        Ok(rest.dot(&rest).sqrt() / norm)
    }
}

impl Propagator for HeatEngine {
    type Field = ScalarField;

    fn rates(&self) -> &[f64] {
        &self.spectrum.eigenvalues
    }

    fn to_modes(&self, f: &ScalarField) -> Array1<f64> {
        let c = self.cy.t().dot(&f.values.dot(&self.cx));
        Array1::from_iter(self.index.iter().map(|&(k, j)| c[[k, j]]))
    }

    fn from_modes(&self, c: &Array1<f64>) -> ScalarField {
        let mut m = Array2::zeros((self.cy.ncols(), self.cx.ncols()));
        for (&(k, j), &v) in self.index.iter().zip(c.iter()) {
            m[[k, j]] = v;
        }
        let values = self.cy.dot(&m.dot(&self.cx.t()));
        ScalarField { grid: self.calculus.grid, values }
    }
}
