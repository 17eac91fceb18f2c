use crate::error::{CoreError, Result};
use crate::norms::{lp_norm, quotient_norm, DecayRates, ExponentTuple, Trajectory};

/// Samples needed in the fitting window.
pub const MIN_FIT_SAMPLES: usize = 10;

/// Samples below this fraction of a component's largest value are treated as
/// roundoff and left out of the fit.
pub const ROUNDOFF_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum FitStatus {
    Fitted,
    /// Every sample in the window is exactly zero.
    ExactlyZero,
    /// Too few samples above the roundoff floor.
    BelowFloor { usable: usize },
}

/// Exponential decay of one component over the second half of the horizon.
#[derive(Clone, Debug, PartialEq)]
pub struct RateFit {
    pub component: &'static str,
    pub status: FitStatus,
    /// Decay rate of the unweighted norm, `-d/dt ln ||.||`.
    pub fitted_rate: f64,
    /// Exponential weight the component carries in the weighted norm.
    pub weight_rate: f64,
    /// Decay rate left after the weight, `fitted_rate - weight_rate`.
    pub residual_rate: f64,
    pub samples: usize,
}

impl RateFit {
    /// Fitted rate at least `(1 - margin)` times the weight rate. Skipped
    /// components count as meeting it.
    pub fn meets(&self, margin: f64) -> bool {
        self.status != FitStatus::Fitted || self.fitted_rate >= (1.0 - margin) * self.weight_rate
    }
}

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn fit(component: &'static str, times: &[f64], values: &[f64], weight_rate: f64) -> RateFit {
    let mut out = RateFit {
        component,
        status: FitStatus::Fitted,
        fitted_rate: f64::NAN,
        weight_rate,
        residual_rate: f64::NAN,
        samples: 0,
    };
    if values.iter().all(|&v| v == 0.0) {
        out.status = FitStatus::ExactlyZero;
        return out;
    }
    let top = values.iter().copied().fold(0.0, f64::max);
    let (t, l): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(values)
        .filter(|(_, &v)| v > ROUNDOFF_FLOOR * top)
        .map(|(&t, &v)| (t, v.ln()))
        .unzip();
    out.samples = t.len();
    if t.len() < MIN_FIT_SAMPLES {
        out.status = FitStatus::BelowFloor { usable: t.len() };
        return out;
    }
    out.fitted_rate = -ls_slope(&t, &l);
    out.residual_rate = out.fitted_rate - weight_rate;
    out
}

/// Fits `ln ||component||` against `t` on the second half of the horizon for
/// `[n]`, `[c]`, `[v]` (class norms in `L^q`, `L^inf`, `L^inf`) and `u` (in
/// `L^p`), and compares against the exponential weights of the decay space.
pub fn fit_decay_rates(traj: &Trajectory, e: &ExponentTuple, rates: &DecayRates) -> Result<Vec<RateFit>> {
    let t_end = *traj.times.last().ok_or_else(|| CoreError::InsufficientData("empty trajectory".into()))?;
    let window: Vec<usize> = (0..traj.len()).filter(|&i| traj.times[i] >= 0.5 * t_end).collect();
    if window.len() < MIN_FIT_SAMPLES {
        return Err(CoreError::InsufficientData(format!(
            "fitting window holds {} samples, need {MIN_FIT_SAMPLES}",
            window.len()
        )));
    }
    let times: Vec<f64> = window.iter().map(|&i| traj.times[i]).collect();
    let mut series = [vec![], vec![], vec![], vec![]];
    for &i in &window {
        series[0].push(quotient_norm(&traj.n[i], e.q)?.0);
        series[1].push(quotient_norm(&traj.c[i], f64::INFINITY)?.0);
        series[2].push(quotient_norm(&traj.v[i], f64::INFINITY)?.0);
        series[3].push(lp_norm(&traj.u[i], e.p)?);
    }
    let w = rates.weights();
    Ok(["n", "c", "v", "u"].iter().zip(series.iter()).zip(w).map(|((&name, s), w)| fit(name, &times, s, w)).collect())
}
