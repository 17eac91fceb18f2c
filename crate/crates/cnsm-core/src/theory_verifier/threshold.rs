use crate::error::{CoreError, Result};
use crate::mild_solver::{solve_mild, Engines, ModelParams, SolverOptions};
use crate::norms::{x_norm, ExponentTuple, InitialData};
use crate::operators::{leray_project, Grid, ScalarField, VectorField};

/// Smooth-bump data direction scaled to unit X norm: Gaussian bumps for the
/// three scalars and a projected vortex for the velocity, placed relative to
/// the domain so the direction is the same profile at every resolution.
pub fn default_direction(grid: Grid, e: &ExponentTuple, engines: &Engines) -> Result<InitialData> {
    let (lx, ly) = (grid.lx, grid.ly);
    let bump = |x0: f64, y0: f64, w: f64| {
        ScalarField::from_fn(grid, |x, y| {
            let (dx, dy) = (x / lx - x0, y / ly - y0);
            (-(dx * dx + dy * dy) / (w * w)).exp()
        })
    };
    let vortex = VectorField::from_fn(grid, |x, y| {
        let (dx, dy) = (x / lx - 0.5, y / ly - 0.5);
        let r = (-(dx * dx + dy * dy) / 0.04).exp();
        (-dy * r, dx * r)
    });
    let data = InitialData {
        n0: bump(0.5, 0.5, 0.15),
        c0: bump(0.35, 0.4, 0.2),
        v0: bump(0.65, 0.6, 0.2),
        u0: leray_project(&vortex),
    };
    let size = x_norm(&data, e, &engines.heat)?;
    Ok(data.scaled(1.0 / size))
}

/// Outcome of one solver run inside the bisection.
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdProbe {
    pub amplitude: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Error category for failed runs, empty otherwise.
    pub outcome: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdResult {
    /// Largest tested amplitude whose run converged.
    pub delta_hat: f64,
    pub bracket: (f64, f64),
    pub width: f64,
    pub trace: Vec<ThresholdProbe>,
}

fn probe(
    amplitude: f64,
    direction: &InitialData,
    params: &ModelParams,
    e: &ExponentTuple,
    engines: &Engines,
    opts: &SolverOptions,
) -> Result<ThresholdProbe> {
    match solve_mild(&direction.scaled(amplitude), params, e, engines, opts) {
        Ok((_, diag)) => {
            Ok(ThresholdProbe { amplitude, converged: true, iterations: diag.iterations(), outcome: String::new() })
        }
        Err(err @ (CoreError::Diverged { .. } | CoreError::NotConverged { .. })) => {
            let iterations = match err {
                CoreError::Diverged { iteration, .. } => iteration,
                CoreError::NotConverged { iterations, .. } => iterations,
                _ => unreachable!(),
            };
            Ok(ThresholdProbe { amplitude, converged: false, iterations, outcome: err.category().to_string() })
        }
        Err(err) => Err(err),
    }
}

/// Bisection on the data amplitude along `direction` (unit X norm). The lower
/// end of `bracket` must converge and the upper end must not.
pub fn threshold_search(
    params: &ModelParams,
    e: &ExponentTuple,
    engines: &Engines,
    direction: &InitialData,
    bracket: (f64, f64),
    steps: usize,
    opts: &SolverOptions,
) -> Result<ThresholdResult> {
    let (mut lo, mut hi) = bracket;
    if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi) {
        return Err(CoreError::InvalidBracket(format!("need 0 <= lo < hi, got [{lo}, {hi}]")));
    }
    let size = x_norm(direction, e, &engines.heat)?;
    if (size - 1.0).abs() > 1e-9 {
        return Err(CoreError::InvalidArgument(format!("direction must have unit X norm, got {size}")));
    }
    let mut trace = Vec::with_capacity(steps + 2);
    let first = probe(lo, direction, params, e, engines, opts)?;
    let lo_ok = first.converged;
    trace.push(first);
    if !lo_ok {
        return Err(CoreError::InvalidBracket(format!("lower amplitude {lo} does not converge")));
    }
    let last = probe(hi, direction, params, e, engines, opts)?;
    let hi_ok = last.converged;
    trace.push(last);
    if hi_ok {
        return Err(CoreError::InvalidBracket(format!("upper amplitude {hi} converges")));
    }
    for _ in 0..steps {
        let mid = 0.5 * (lo + hi);
        let p = probe(mid, direction, params, e, engines, opts)?;
        if p.converged {
            lo = mid;
        } else {
            hi = mid;
        }
        trace.push(p);
    }
    Ok(ThresholdResult { delta_hat: lo, bracket: (lo, hi), width: hi - lo, trace })
}
