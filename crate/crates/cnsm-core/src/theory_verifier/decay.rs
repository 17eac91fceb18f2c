use super::corpus::DecayCorpus;
use crate::error::{CoreError, Result};
use crate::norms::{lp_norm, quotient_norm};
use crate::operators::{divergence, gradient, ScalarField, VectorField};
use crate::semigroups::{HeatEngine, StokesEngine};
use std::fmt;
use std::str::FromStr;

/// The semigroup decay estimates that can be measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EstimateId {
    /// `||e^{t Lap} w||_p` against `||w||_q`, `w` mean-zero.
    C0,
    /// The same estimate between quotient norms of classes.
    C0Quotient,
    /// `||grad e^{t Lap} w||_p` against `t^{-1/2} ||w||_p`.
    C1,
    /// `||grad e^{t Lap} w||_p` against `||w||_q`.
    C2,
    /// `||e^{t Lap} div w||_p` against `||w||_q`.
    C3,
    /// `||e^{-tA} w||_p` against `||w||_q`, `w` solenoidal.
    C4,
    /// `||grad e^{-tA} w||_p` against `||w||_q`.
    C5,
    /// `||e^{-tA} P div W||_p` against `||W||_q`, `W` a tensor field.
    C6,
}

impl EstimateId {
    pub const ALL: [EstimateId; 8] = [
        EstimateId::C0,
        EstimateId::C0Quotient,
        EstimateId::C1,
        EstimateId::C2,
        EstimateId::C3,
        EstimateId::C4,
        EstimateId::C5,
        EstimateId::C6,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            EstimateId::C0 => "C0",
            EstimateId::C0Quotient => "C0q",
            EstimateId::C1 => "C1",
            EstimateId::C2 => "C2",
            EstimateId::C3 => "C3",
            EstimateId::C4 => "C4",
            EstimateId::C5 => "C5",
            EstimateId::C6 => "C6",
        }
    }

    pub fn is_stokes(&self) -> bool {
        matches!(self, EstimateId::C4 | EstimateId::C5 | EstimateId::C6)
    }

    /// Extra half power of `t` carried by a derivative in the estimate.
    fn derivative_order(&self) -> f64 {
        match self {
            EstimateId::C0 | EstimateId::C0Quotient | EstimateId::C4 => 0.0,
            _ => 0.5,
        }
    }

    /// Whether the estimate is stated for the exponent pair.
    pub fn admits(&self, p: f64, q: f64) -> bool {
        if !(q >= 1.0 && p >= q) {
            return false;
        }
        match self {
            EstimateId::C0 | EstimateId::C0Quotient | EstimateId::C1 | EstimateId::C2 => true,
            EstimateId::C3 => q > 1.0 && (p.is_finite() || p > q),
            EstimateId::C4 | EstimateId::C5 | EstimateId::C6 => q > 1.0 && p.is_finite(),
        }
    }
}

impl fmt::Display for EstimateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for EstimateId {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        EstimateId::ALL
            .into_iter()
            .find(|e| e.tag().eq_ignore_ascii_case(s))
            .ok_or_else(|| CoreError::UnknownTag(format!("estimate '{s}'")))
    }
}

/// Measured ratios of one decay estimate over a corpus and a time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayEnvelopeReport {
    pub estimate: EstimateId,
    pub p: f64,
    pub q: f64,
    pub times: Vec<f64>,
    /// `ratios[sample][time]`; `None` where both sides vanish.
    pub ratios: Vec<Vec<Option<f64>>>,
    pub envelope: f64,
    pub excluded: usize,
    /// Relative energy outside the retained modes, per sample.
    pub tail_energy: Vec<f64>,
}

impl DecayEnvelopeReport {
    /// Largest ratio of each sample.
    pub fn sample_envelopes(&self) -> Vec<f64> {
        self.ratios.iter().map(|r| r.iter().flatten().copied().fold(0.0, f64::max)).collect()
    }

    pub fn all_finite(&self) -> bool {
        self.ratios.iter().flatten().flatten().all(|r| r.is_finite() && *r >= 0.0)
    }
}

/// Relative change of an envelope between two resolutions.
pub fn envelope_change(coarse: &DecayEnvelopeReport, fine: &DecayEnvelopeReport) -> f64 {
    (fine.envelope - coarse.envelope).abs() / coarse.envelope.abs().max(f64::MIN_POSITIVE)
}

/// Default sample times for decay measurements: 25 log-spaced points on `[1e-4, 2]`.
pub fn default_decay_times() -> Vec<f64> {
    crate::norms::log_grid(1e-4, 2.0, 25)
}

fn jacobian_magnitude(u: &VectorField) -> ScalarField {
    let gx = gradient(&u.component_x());
    let gy = gradient(&u.component_y());
    let values = (&gx.x * &gx.x + &gx.y * &gx.y + &gy.x * &gy.x + &gy.y * &gy.y).mapv(f64::sqrt);
    ScalarField { grid: u.grid, values }
}

fn tensor_magnitude(w: &(VectorField, VectorField)) -> ScalarField {
    let (a, b) = w;
    let values = (&a.x * &a.x + &a.y * &a.y + &b.x * &b.x + &b.y * &b.y).mapv(f64::sqrt);
    ScalarField { grid: a.grid, values }
}

fn tensor_divergence(w: &(VectorField, VectorField)) -> VectorField {
    VectorField::from_components(divergence(&w.0), divergence(&w.1)).expect("same grid")
}

const MEAN_TOL: f64 = 1e-12;

/// Class norms below this fraction of the representative's plain norm are
/// roundoff of a constant class and count as zero.
pub const ZERO_CLASS_TOL: f64 = 1e-12;

fn class_norm(w: &ScalarField, p: f64) -> Result<f64> {
    let n = quotient_norm(w, p)?.0;
    Ok(if n <= ZERO_CLASS_TOL * lp_norm(w, p)? { 0.0 } else { n })
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    if num == 0.0 && den == 0.0 {
        None
    } else if den == 0.0 {
        Some(f64::INFINITY)
    } else {
        Some(num / den)
    }
}

/// Measures `num(t) / (t^{-theta} e^{-gap t} den)` for every sample and time,
/// where `theta = N/2 (1/q - 1/p)` plus one half for derivative estimates
/// (estimate `C1` uses `theta = 1/2` and no exponential factor).
pub fn verify_decay(
    heat: &HeatEngine,
    stokes: Option<&StokesEngine>,
    estimate: EstimateId,
    p: f64,
    q: f64,
    corpus: &DecayCorpus,
    times: &[f64],
) -> Result<DecayEnvelopeReport> {
    if corpus.is_empty() {
        return Err(CoreError::InsufficientData("empty decay corpus".into()));
    }
    if times.is_empty() || times.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(CoreError::InvalidArgument("decay times must be positive and finite".into()));
    }
    if !estimate.admits(p, q) {
        return Err(CoreError::InvalidArgument(format!("estimate {estimate} is not stated for p = {p}, q = {q}")));
    }
    let dim = heat.spectrum().grid;
    let nd = 2.0;
    let theta = nd / 2.0 * (1.0 / q - 1.0 / p) + estimate.derivative_order();
    let stokes_engine = || {
        stokes.ok_or_else(|| CoreError::InvalidArgument(format!("estimate {estimate} needs a Stokes engine")))
    };
    let gap = if estimate.is_stokes() { stokes_engine()?.gap() } else { heat.gap() };
    let envelope_factor = |t: f64| match estimate {
        EstimateId::C1 => t.powf(-0.5),
        _ => t.powf(-theta) * (-gap * t).exp(),
    };

    let mut ratios = Vec::with_capacity(corpus.len());
    let mut tail_energy = Vec::with_capacity(corpus.len());
    for i in 0..corpus.len() {
        let row: Vec<Option<f64>> = match estimate {
            EstimateId::C0 | EstimateId::C0Quotient | EstimateId::C1 | EstimateId::C2 => {
                let w = &corpus.scalars[i];
                if w.grid != dim {
                    return Err(CoreError::GridMismatch);
                }
                if estimate == EstimateId::C0 && w.mean().abs() > MEAN_TOL * w.max_abs().max(1.0) {
                    return Err(CoreError::InvalidArgument(format!(
                        "sample {i} is not mean-zero (mean {:e})",
                        w.mean()
                    )));
                }
                tail_energy.push(heat.tail_energy(w)?);
                let den = match estimate {
                    EstimateId::C0Quotient => class_norm(w, q)?,
                    EstimateId::C1 => lp_norm(w, p)?,
                    _ => lp_norm(w, q)?,
                };
                times
                    .iter()
                    .map(|&t| {
                        let num = match estimate {
                            EstimateId::C0 => lp_norm(&heat.heat_apply(t, w)?, p)?,
                            EstimateId::C0Quotient => class_norm(&heat.heat_apply(t, w)?, p)?,
                            _ => lp_norm(&heat.heat_grad_apply(t, w)?, p)?,
                        };
                        Ok(ratio(num, envelope_factor(t) * den))
                    })
                    .collect::<Result<_>>()?
            }
            EstimateId::C3 => {
                let w = &corpus.vectors[i];
                tail_energy.push(heat.tail_energy(&divergence(w))?);
                let den = lp_norm(w, q)?;
                times
                    .iter()
                    .map(|&t| Ok(ratio(lp_norm(&heat.heat_div_apply(t, w)?, p)?, envelope_factor(t) * den)))
                    .collect::<Result<_>>()?
            }
            EstimateId::C4 | EstimateId::C5 => {
                let engine = stokes_engine()?;
                let w = &corpus.solenoidal[i];
                tail_energy.push(engine.tail_energy(w)?);
                let den = lp_norm(w, q)?;
                times
                    .iter()
                    .zip(engine.stokes_apply_many(times, w)?)
                    .map(|(&t, s)| {
                        let num = if estimate == EstimateId::C4 {
                            lp_norm(&s, p)?
                        } else {
                            lp_norm(&jacobian_magnitude(&s), p)?
                        };
                        Ok(ratio(num, envelope_factor(t) * den))
                    })
                    .collect::<Result<_>>()?
            }
            EstimateId::C6 => {
                let engine = stokes_engine()?;
                let w = &corpus.tensors[i];
                let f = tensor_divergence(w);
                tail_energy.push(engine.tail_energy(&f)?);
                let den = lp_norm(&tensor_magnitude(w), q)?;
                times
                    .iter()
                    .zip(engine.stokes_forced_apply_many(times, &f)?)
                    .map(|(&t, s)| Ok(ratio(lp_norm(&s, p)?, envelope_factor(t) * den)))
                    .collect::<Result<_>>()?
            }
        };
        ratios.push(row);
    }
    let excluded = ratios.iter().flatten().filter(|r| r.is_none()).count();
    let envelope = ratios.iter().flatten().flatten().copied().fold(0.0, f64::max);
    Ok(DecayEnvelopeReport { estimate, p, q, times: times.to_vec(), ratios, envelope, excluded, tail_energy })
}
