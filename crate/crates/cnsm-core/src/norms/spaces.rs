//! Data space X, solution space Y and its exponentially weighted variant.

use super::lp::lp_norm;
use super::quotient::quotient_norm;
use crate::error::{CoreError, Result};
use crate::operators::{gradient, Grid, ScalarField, VectorField, DIV_TOL};
use crate::semigroups::HeatEngine;

/// Dimension `N` and Lebesgue exponents of the function-space framework.
/// Infinite exponents are stored as `f64::INFINITY`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentTuple {
    pub dim: usize,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub s: f64,
    pub horizon: f64,
    /// The horizon stands in for `T = inf`.
    pub infinite_horizon: bool,
}

impl ExponentTuple {
    fn half_dim(&self) -> f64 {
        self.dim as f64 / 2.0
    }

    /// Time weight exponent of the density, `N/2 (2/N - 1/q)`.
    pub fn density_weight(&self) -> f64 {
        self.half_dim() * (2.0 / self.dim as f64 - 1.0 / self.q)
    }

    /// Time weight exponent of the signal gradients, `N/2 (1/N - 1/r)`.
    pub fn gradient_weight(&self) -> f64 {
        self.half_dim() * (1.0 / self.dim as f64 - 1.0 / self.r)
    }

    /// Time weight exponent of the velocity, `N/2 (1/N - 1/p)`.
    pub fn velocity_weight(&self) -> f64 {
        self.half_dim() * (1.0 / self.dim as f64 - 1.0 / self.p)
    }

    fn check_fields(&self) -> Result<()> {
        if self.dim != 2 {
            return Err(CoreError::InvalidArgument(format!(
                "field norms are two-dimensional, exponent tuple has N = {}",
                self.dim
            )));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(CoreError::InvalidArgument(format!("horizon must be positive, got {}", self.horizon)));
        }
        Ok(())
    }
}

/// `m` logarithmically spaced points on `[a, b]`.
pub fn log_grid(a: f64, b: f64, m: usize) -> Vec<f64> {
    if m == 1 {
        return vec![b];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..m).map(|i| (la + (lb - la) * i as f64 / (m - 1) as f64).exp()).collect()
}

/// Sample times on `(0, T]`: `40 k` log-spaced points on `[1e-4 T, 0.1 T]` followed
/// by `24 k` evenly spaced points up to `T`, for refinement factor `k`.
pub fn time_grid(horizon: f64, refine: usize) -> Result<Vec<f64>> {
    if !(horizon.is_finite() && horizon > 0.0) || refine == 0 {
        return Err(CoreError::InvalidArgument(format!(
            "time grid needs a positive horizon and refinement, got {horizon}, {refine}"
        )));
    }
    let mut t = log_grid(1e-4 * horizon, 0.1 * horizon, 40 * refine);
    let m = 24 * refine;
    let start = 0.1 * horizon;
    t.extend((1..=m).map(|i| start + (horizon - start) * i as f64 / m as f64));
    Ok(t)
}

/// Initial data `(n0, c0, v0, u0)`.
#[derive(Clone, Debug)]
pub struct InitialData {
    pub n0: ScalarField,
    pub c0: ScalarField,
    pub v0: ScalarField,
    pub u0: VectorField,
}

impl InitialData {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            n0: ScalarField::zeros(grid),
            c0: ScalarField::zeros(grid),
            v0: ScalarField::zeros(grid),
            u0: VectorField::zeros(grid),
        }
    }

    pub fn grid(&self) -> Grid {
        self.n0.grid
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { n0: self.n0.scaled(s), c0: self.c0.scaled(s), v0: self.v0.scaled(s), u0: self.u0.scaled(s) }
    }
}

/// The four terms of the X norm.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct XNorms {
    pub n: f64,
    pub c: f64,
    pub v: f64,
    pub u: f64,
}

impl XNorms {
    pub fn total(&self) -> f64 {
        self.n + self.c + self.v + self.u
    }

    /// `4 ||n0|| + ||c0|| + ||v0|| + ||u0||`, the data size in the ball radius bound.
    pub fn ball_size(&self) -> f64 {
        4.0 * self.n + self.c + self.v + self.u
    }
}

/// Number of log-spaced times used for the sup terms of the X norm.
pub const X_SUP_SAMPLES: usize = 40;

fn gradient_sup(heat: &HeatEngine, f: &ScalarField, e: &ExponentTuple) -> Result<f64> {
    let theta = e.gradient_weight();
    let mut sup = 0.0f64;
    for t in log_grid(1e-4 * e.horizon, e.horizon, X_SUP_SAMPLES) {
        let g = heat.heat_grad_apply(t, f)?;
        sup = sup.max(t.powf(theta) * lp_norm(&g, e.r)?);
    }
    Ok(sup)
}

pub fn x_components(data: &InitialData, e: &ExponentTuple, heat: &HeatEngine) -> Result<XNorms> {
    e.check_fields()?;
    let div = crate::operators::divergence(&data.u0).max_abs();
    if div > DIV_TOL {
        return Err(CoreError::NotSolenoidal(div));
    }
    let nd = e.dim as f64;
    Ok(XNorms {
        n: quotient_norm(&data.n0, nd / 2.0)?.0,
        c: quotient_norm(&data.c0, f64::INFINITY)?.0 + gradient_sup(heat, &data.c0, e)?,
        v: quotient_norm(&data.v0, f64::INFINITY)?.0 + gradient_sup(heat, &data.v0, e)?,
        u: lp_norm(&data.u0, nd)?,
    })
}

/// `||[n0, c0, v0, u0]||_X`, sup terms over 40 log-spaced times in `[1e-4 T, T]`.
pub fn x_norm(data: &InitialData, e: &ExponentTuple, heat: &HeatEngine) -> Result<f64> {
    Ok(x_components(data, e, heat)?.total())
}

/// Fields of a candidate solution at positive sample times. The scalar fields
/// are representatives of their classes.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub n: Vec<ScalarField>,
    pub c: Vec<ScalarField>,
    pub v: Vec<ScalarField>,
    pub u: Vec<VectorField>,
}

impl Trajectory {
    pub fn new(
        times: Vec<f64>,
        n: Vec<ScalarField>,
        c: Vec<ScalarField>,
        v: Vec<ScalarField>,
        u: Vec<VectorField>,
    ) -> Result<Self> {
        let m = times.len();
        if n.len() != m || c.len() != m || v.len() != m || u.len() != m {
            return Err(CoreError::InvalidArgument("trajectory components differ in length".into()));
        }
        if times.first().is_some_and(|&t| t <= 0.0) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CoreError::InvalidArgument("sample times must be positive and increasing".into()));
        }
        Ok(Self { times, n, c, v, u })
    }

    pub fn zeros(grid: Grid, times: Vec<f64>) -> Result<Self> {
        let m = times.len();
        let s = vec![ScalarField::zeros(grid); m];
        Self::new(times, s.clone(), s.clone(), s, vec![VectorField::zeros(grid); m])
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            times: self.times.clone(),
            n: self.n.iter().map(|f| f.scaled(s)).collect(),
            c: self.c.iter().map(|f| f.scaled(s)).collect(),
            v: self.v.iter().map(|f| f.scaled(s)).collect(),
            u: self.u.iter().map(|f| f.scaled(s)).collect(),
        }
    }

    /// Componentwise difference on a shared time grid.
    pub fn difference(&self, other: &Trajectory) -> Result<Trajectory> {
        if self.times != other.times {
            return Err(CoreError::InvalidArgument("trajectories use different time grids".into()));
        }
        let sub = |a: &[ScalarField], b: &[ScalarField]| a.iter().zip(b).map(|(x, y)| x - y).collect();
        Ok(Self {
            times: self.times.clone(),
            n: sub(&self.n, &other.n),
            c: sub(&self.c, &other.c),
            v: sub(&self.v, &other.v),
            u: self.u.iter().zip(&other.u).map(|(x, y)| x - y).collect(),
        })
    }

    /// Largest cellwise |divergence| of the velocity over all samples.
    pub fn max_divergence(&self) -> f64 {
        self.u.iter().map(|u| crate::operators::divergence(u).max_abs()).fold(0.0, f64::max)
    }
}

/// Time-weighted norms of one sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleNorms {
    pub t: f64,
    /// `t^a ||[n]||_{q,~}`
    pub n: f64,
    /// `||[c]||_{inf,~}`
    pub c: f64,
    /// `t^b ||grad c||_r`
    pub grad_c: f64,
    pub v: f64,
    pub grad_v: f64,
    /// `t^d ||u||_p`
    pub u: f64,
}

impl SampleNorms {
    pub const COMPONENTS: [&'static str; 6] = ["n", "c", "grad_c", "v", "grad_v", "u"];

    pub fn values(&self) -> [f64; 6] {
        [self.n, self.c, self.grad_c, self.v, self.grad_v, self.u]
    }
}

/// Per-sample weighted norms of a trajectory.
pub fn weighted_samples(traj: &Trajectory, e: &ExponentTuple) -> Result<Vec<SampleNorms>> {
    e.check_fields()?;
    let (a, b, d) = (e.density_weight(), e.gradient_weight(), e.velocity_weight());
    let mut out = Vec::with_capacity(traj.len());
    for i in 0..traj.len() {
        let t = traj.times[i];
        out.push(SampleNorms {
            t,
            n: t.powf(a) * quotient_norm(&traj.n[i], e.q)?.0,
            c: quotient_norm(&traj.c[i], f64::INFINITY)?.0,
            grad_c: t.powf(b) * lp_norm(&gradient(&traj.c[i]), e.r)?,
            v: quotient_norm(&traj.v[i], f64::INFINITY)?.0,
            grad_v: t.powf(b) * lp_norm(&gradient(&traj.v[i]), e.r)?,
            u: t.powf(d) * lp_norm(&traj.u[i], e.p)?,
        });
    }
    Ok(out)
}

/// Component norms of Y. `c` and `v` each sum a sup of the class norm and
/// a sup of the weighted gradient norm.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct YNorms {
    pub n: f64,
    pub c_sup: f64,
    pub c_grad: f64,
    pub v_sup: f64,
    pub v_grad: f64,
    pub u: f64,
}

impl YNorms {
    pub fn c(&self) -> f64 {
        self.c_sup + self.c_grad
    }

    pub fn v(&self) -> f64 {
        self.v_sup + self.v_grad
    }

    pub fn total(&self) -> f64 {
        self.n + self.c() + self.v() + self.u
    }

    /// `[Y1, Y2, Y3, Y4]`.
    pub fn components(&self) -> [f64; 4] {
        [self.n, self.c(), self.v(), self.u]
    }
}

fn sup_norms(samples: &[SampleNorms], factors: impl Fn(f64) -> [f64; 4]) -> YNorms {
    let mut y = YNorms::default();
    for s in samples {
        let [fn_, fc, fv, fu] = factors(s.t);
        y.n = y.n.max(fn_ * s.n);
        y.c_sup = y.c_sup.max(fc * s.c);
        y.c_grad = y.c_grad.max(s.grad_c);
        y.v_sup = y.v_sup.max(fv * s.v);
        y.v_grad = y.v_grad.max(s.grad_v);
        y.u = y.u.max(fu * s.u);
    }
    y
}

pub fn y_components(traj: &Trajectory, e: &ExponentTuple) -> Result<YNorms> {
    if traj.is_empty() {
        return Err(CoreError::InsufficientData("empty trajectory".into()));
    }
    Ok(sup_norms(&weighted_samples(traj, e)?, |_| [1.0; 4]))
}

/// `||[n, c, v, u]||_Y` with sups over the trajectory samples.
pub fn y_norm(traj: &Trajectory, e: &ExponentTuple) -> Result<f64> {
    Ok(y_components(traj, e)?.total())
}

/// Decay rates entering the exponential weights of Y^exp.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayRates {
    pub sigma_tilde: f64,
    pub kappa1_beta1: f64,
    pub beta2: f64,
    pub rho2: f64,
}

impl DecayRates {
    /// Exponential rates applied to `n`, `c`, `v`, `u`.
    pub fn weights(&self) -> [f64; 4] {
        let s = self.sigma_tilde;
        [s, self.kappa1_beta1.min(s), self.beta2.min(s), self.rho2.min(s)]
    }
}

/// Growth of one exponentially weighted series over the last decade of times.
#[derive(Clone, Debug, PartialEq)]
pub struct Trend {
    pub component: &'static str,
    /// Least-squares slope of `ln(weighted value)` against `t`.
    pub growth_rate: f64,
    /// Ratio of the final weighted value to the one at the start of the window.
    pub final_ratio: f64,
    pub bounded: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct YexpReport {
    pub norms: YNorms,
    pub trends: Vec<Trend>,
}

impl YexpReport {
    pub fn total(&self) -> f64 {
        self.norms.total()
    }

    pub fn bounded(&self) -> bool {
        self.trends.iter().all(|t| t.bounded)
    }
}

/// Allowed growth of a weighted series across the final decade before it is
/// reported as unbounded.
pub const TREND_GROWTH_LIMIT: f64 = 1.05;

fn trend(component: &'static str, pts: &[(f64, f64)]) -> Trend {
    let pts: Vec<(f64, f64)> = pts.iter().copied().filter(|p| p.1 > 0.0 && p.1.is_finite()).collect();
    if pts.len() < 2 {
        return Trend { component, growth_rate: 0.0, final_ratio: 1.0, bounded: true };
    }
    let m = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let ml = pts.iter().map(|p| p.1.ln()).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1.ln() - ml)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let growth_rate = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let final_ratio = pts[pts.len() - 1].1 / pts[0].1;
    Trend { component, growth_rate, final_ratio, bounded: final_ratio <= TREND_GROWTH_LIMIT }
}

/// `||[n, c, v, u]||_{Y^exp}` over the samples, with the trend of each weighted
/// series over `[T/10, T]`.
pub fn yexp_norm(traj: &Trajectory, e: &ExponentTuple, rates: &DecayRates) -> Result<YexpReport> {
    if traj.is_empty() {
        return Err(CoreError::InsufficientData("empty trajectory".into()));
    }
    let w = rates.weights();
    if w.iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(CoreError::InvalidArgument(format!("decay rates must be finite and >= 0, got {rates:?}")));
    }
    let samples = weighted_samples(traj, e)?;
    let factors = |t: f64| [(w[0] * t).exp(), (w[1] * t).exp(), (w[2] * t).exp(), (w[3] * t).exp()];
    let norms = sup_norms(&samples, factors);
    let t_end = *traj.times.last().unwrap();
    let tail: Vec<&SampleNorms> = samples.iter().filter(|s| s.t >= 0.1 * t_end).collect();
    let series = |f: &dyn Fn(&SampleNorms) -> f64| -> Vec<(f64, f64)> { tail.iter().map(|s| (s.t, f(s))).collect() };
    let trends = vec![
        trend("n", &series(&|s| factors(s.t)[0] * s.n)),
        trend("c", &series(&|s| factors(s.t)[1] * s.c)),
        trend("grad_c", &series(&|s| s.grad_c)),
        trend("v", &series(&|s| factors(s.t)[2] * s.v)),
        trend("grad_v", &series(&|s| s.grad_v)),
        trend("u", &series(&|s| factors(s.t)[3] * s.u)),
    ];
    Ok(YexpReport { norms, trends })
}
