use crate::error::{CoreError, Result};

/// Per-iteration record of a Picard run. Entry 0 of `norms` is the first
/// iterate; entry `k` of `distances` is the distance between iterates `k+1`
/// and `k+2`, and `ratios[k]` compares `distances[k+1]` with `distances[k]`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PicardDiagnostics {
    pub norms: Vec<f64>,
    pub distances: Vec<f64>,
    pub ratios: Vec<f64>,
    pub wall_ms: Vec<f64>,
    pub converged: bool,
}

impl PicardDiagnostics {
    pub(crate) fn record(&mut self, norm: f64, distance: f64, wall_ms: f64) {
        if let Some(&prev) = self.distances.last() {
            self.ratios.push(if prev > 0.0 { distance / prev } else { 0.0 });
        }
        self.norms.push(norm);
        self.distances.push(distance);
        self.wall_ms.push(wall_ms);
    }

    pub fn iterations(&self) -> usize {
        self.distances.len()
    }

    /// Mean of the last three contraction ratios.
    pub fn trend(&self) -> f64 {
        let tail = &self.ratios[self.ratios.len().saturating_sub(3)..];
        if tail.is_empty() {
            f64::NAN
        } else {
            tail.iter().sum::<f64>() / tail.len() as f64
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContractionReport {
    /// Geometric ratio fitted to the distances.
    pub rho: f64,
    /// Largest iterate norm.
    pub radius: f64,
    /// Empirical constant from `rho = 4 C R`.
    pub constant: f64,
    pub x0: f64,
    /// `80 X0 C^2 < 1`.
    pub discriminant_ok: bool,
    pub contracting: bool,
    /// Relative spread (max/min - 1) of the per-step constants over the second half.
    pub constant_spread: f64,
}

/// Least-squares slope of `ln d_k` against `k`, over positive distances.
fn log_slope(d: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        d.iter().enumerate().filter(|(_, v)| **v > 0.0 && v.is_finite()).map(|(k, v)| (k as f64, v.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

pub fn contraction_report(diag: &PicardDiagnostics, x0: f64) -> Result<ContractionReport> {
    if diag.distances.len() < 3 {
        return Err(CoreError::InsufficientData(format!(
            "contraction fit needs 3 recorded distances, got {}",
            diag.distances.len()
        )));
    }
    if !(x0.is_finite() && x0 >= 0.0) {
        return Err(CoreError::InvalidArgument(format!("initial-data norm must be finite and >= 0, got {x0}")));
    }
    let rho = match log_slope(&diag.distances) {
        Some(s) => s.exp(),
        None => 0.0,
    };
    let radius = diag.norms.iter().copied().fold(0.0, f64::max);
    let constant = if radius > 0.0 { rho / (4.0 * radius) } else { 0.0 };
    let half = diag.ratios.len() / 2;
    let per_step: Vec<f64> = diag.ratios[half..]
        .iter()
        .filter(|r| **r > 0.0)
        .map(|r| r / (4.0 * radius))
        .filter(|c| c.is_finite())
        .collect();
    let constant_spread = match (per_step.iter().copied().reduce(f64::min), per_step.iter().copied().reduce(f64::max)) {
        (Some(lo), Some(hi)) if lo > 0.0 => hi / lo - 1.0,
        _ => 0.0,
    };
    Ok(ContractionReport {
        rho,
        radius,
        constant,
        x0,
        discriminant_ok: 80.0 * x0 * constant * constant < 1.0,
        contracting: rho < 1.0,
        constant_spread,
    })
}
