use crate::error::{CoreError, Result};
use crate::operators::{Grid, ScalarField, VectorField};

/// Fields with a pointwise magnitude.
pub trait Pointwise {
    fn grid(&self) -> Grid;
    fn magnitudes(&self) -> Vec<f64>;
}

impl Pointwise for ScalarField {
    fn grid(&self) -> Grid {
        self.grid
    }

    fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.abs()).collect()
    }
}

impl Pointwise for VectorField {
    fn grid(&self) -> Grid {
        self.grid
    }

    fn magnitudes(&self) -> Vec<f64> {
        self.x.iter().zip(self.y.iter()).map(|(a, b)| a.hypot(*b)).collect()
    }
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(CoreError::InvalidArgument(format!("Lebesgue exponent must be >= 1, got {p}")));
    }
    Ok(())
}

/// Quadrature L^p norm of nonnegative samples with equal cell weight `w`.
pub(crate) fn lp_of(mags: impl Iterator<Item = f64> + Clone, w: f64, p: f64) -> f64 {
    let max = mags.clone().fold(0.0f64, f64::max);
    if p.is_infinite() || max == 0.0 {
        return max;
    }
    if p == 1.0 {
        return mags.sum::<f64>() * w;
    }
    if p == 2.0 {
        return (mags.map(|m| m * m).sum::<f64>() * w).sqrt();
    }
    let s: f64 = mags.map(|m| (m / max).powf(p)).sum();
    max * (s * w).powf(1.0 / p)
}

/// `(sum |f_i|^p hx hy)^(1/p)`, or `max |f_i|` for `p = inf`.
pub fn lp_norm<F: Pointwise>(f: &F, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let m = f.magnitudes();
    Ok(lp_of(m.iter().copied(), f.grid().cell_area(), p))
}
