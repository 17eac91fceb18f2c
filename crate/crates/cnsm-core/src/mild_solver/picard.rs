use super::duhamel::duhamel_nodes;
use super::params::{Engines, ModelParams, SolverOptions};
use super::report::PicardDiagnostics;
use crate::error::{CoreError, Result};
use crate::norms::{
    class_product, select_representative, time_grid, y_components, ExponentTuple, InitialData, QuotientClass,
    Trajectory, YNorms,
};
use crate::operators::{divergence, gradient, ScalarField, VectorField};
use crate::semigroups::Propagator;
use std::time::Instant;

/// Fields at every solver node, node 0 being `t = 0`.
#[derive(Clone, Debug)]
pub(crate) struct NodeFields {
    pub nodes: Vec<f64>,
    pub n: Vec<ScalarField>,
    pub c: Vec<ScalarField>,
    pub v: Vec<ScalarField>,
    pub u: Vec<VectorField>,
}

impl NodeFields {
    fn from_trajectory(data: &InitialData, traj: &Trajectory) -> Self {
        let mut nodes = vec![0.0];
        nodes.extend_from_slice(&traj.times);
        let with = |first: &ScalarField, rest: &[ScalarField]| {
            let mut out = vec![first.clone()];
            out.extend_from_slice(rest);
            out
        };
        let mut u = vec![data.u0.clone()];
        u.extend_from_slice(&traj.u);
        Self {
            nodes,
            n: with(&data.n0, &traj.n),
            c: with(&data.c0, &traj.c),
            v: with(&data.v0, &traj.v),
            u,
        }
    }

    fn trajectory(&self) -> Result<Trajectory> {
        Trajectory::new(
            self.nodes[1..].to_vec(),
            self.n[1..].to_vec(),
            self.c[1..].to_vec(),
            self.v[1..].to_vec(),
            self.u[1..].to_vec(),
        )
    }
}

/// `w . grad f`.
fn advect(w: &VectorField, f: &ScalarField) -> ScalarField {
    let g = gradient(f);
    ScalarField { grid: f.grid, values: &w.x * &g.x + &w.y * &g.y }
}

/// `(w . grad) w`.
fn self_advect(w: &VectorField) -> VectorField {
    let ax = advect(w, &w.component_x());
    let ay = advect(w, &w.component_y());
    VectorField { grid: w.grid, x: ax.values, y: ay.values }
}

fn semigroup_flow<P: Propagator>(engine: &P, f0: &P::Field, shift: f64, nodes: &[f64]) -> Vec<P::Field> {
    let c = engine.to_modes(f0);
    nodes.iter().map(|&t| engine.from_modes(&engine.evolve(&c, t, shift))).collect()
}

fn minus(a: &[ScalarField], b: &[ScalarField]) -> Vec<ScalarField> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Linear part `[n1, c1, v1, u1]` of the iteration on the given nodes.
pub(crate) fn first_fields(data: &InitialData, params: &ModelParams, engines: &Engines, nodes: &[f64]) -> NodeFields {
    let k1b1 = params.kappa1 as f64 * params.beta1;
    let mut f = NodeFields {
        nodes: nodes.to_vec(),
        n: semigroup_flow(&engines.heat, &data.n0, params.sigma, nodes),
        c: semigroup_flow(&engines.heat, &data.c0, -k1b1, nodes),
        v: semigroup_flow(&engines.heat, &data.v0, -params.beta2, nodes),
        u: semigroup_flow(&engines.stokes, &data.u0, 0.0, nodes),
    };
    f.n[0] = data.n0.clone();
    f.c[0] = data.c0.clone();
    f.v[0] = data.v0.clone();
    f.u[0] = data.u0.clone();
    f
}

/// One application of the integral map. `cur` supplies the previous iterate;
/// the signal and velocity equations use the density produced in this same
/// step, and the velocity forcing uses that density's optimal `L^q` representative.
pub(crate) fn integral_map(
    cur: &NodeFields,
    first: &NodeFields,
    params: &ModelParams,
    e: &ExponentTuple,
    engines: &Engines,
    density: Option<&[ScalarField]>,
) -> Result<NodeFields> {
    let nodes = &cur.nodes;
    let m = nodes.len();
    let k1 = params.kappa1 as f64;
    let k2 = params.kappa2 as f64;

    let mut fn_ = Vec::with_capacity(m);
    for i in 0..m {
        let (n, c, v, u) = (&cur.n[i], &cur.c[i], &cur.v[i], &cur.u[i]);
        let flux = u.times(n).axpy(params.chi, &gradient(c).times(n)).axpy(-params.xi, &gradient(v).times(n));
        let mut f = divergence(&flux);
        if params.mu != 0.0 {
            f = f.axpy(params.mu, &class_product(n, n));
        }
        fn_.push(f);
    }
    let n_new = match density {
        Some(d) => d.to_vec(),
        None => {
            let mut n = minus(&first.n, &duhamel_nodes(&engines.heat, params.sigma, nodes, &fn_)?);
            n[0] = first.n[0].clone();
            n
        }
    };

    let mut fc = Vec::with_capacity(m);
    let mut fv = Vec::with_capacity(m);
    let mut fu = Vec::with_capacity(m);
    for i in 0..m {
        let (n, c, v, u) = (&cur.n[i], &cur.c[i], &cur.v[i], &cur.u[i]);
        let mut f = advect(u, c).axpy(-k1 * params.alpha1, &n_new[i]);
        if k2 != 0.0 {
            f = f.axpy(k2 * params.gamma, &class_product(c, n));
        }
        fc.push(f);
        fv.push(advect(u, v).axpy(-params.alpha2, &n_new[i]));
        let rep = select_representative(&QuotientClass::new(n_new[i].clone()), e.q)?;
        fu.push(&self_advect(u) + &params.phi_grad.times(&rep));
    }
    let mut c_new = minus(&first.c, &duhamel_nodes(&engines.heat, -k1 * params.beta1, nodes, &fc)?);
    let mut v_new = minus(&first.v, &duhamel_nodes(&engines.heat, -params.beta2, nodes, &fv)?);
    let du = duhamel_nodes(&engines.stokes, 0.0, nodes, &fu)?;
    let mut u_new: Vec<VectorField> = first.u.iter().zip(&du).map(|(a, b)| a - b).collect();
    c_new[0] = first.c[0].clone();
    v_new[0] = first.v[0].clone();
    u_new[0] = first.u[0].clone();
    Ok(NodeFields { nodes: nodes.clone(), n: n_new, c: c_new, v: v_new, u: u_new })
}

fn all_finite(f: &NodeFields) -> bool {
    f.n.iter().chain(&f.c).chain(&f.v).all(|x| x.is_finite()) && f.u.iter().all(|x| x.is_finite())
}

fn check_inputs(data: &InitialData, params: &ModelParams, e: &ExponentTuple, engines: &Engines) -> Result<()> {
    params.validate()?;
    let g = engines.grid();
    if data.grid() != g || params.phi_grad.grid != g || data.c0.grid != g || data.v0.grid != g || data.u0.grid != g {
        return Err(CoreError::GridMismatch);
    }
    params.potential_weighted_sup(e)?;
    Ok(())
}

/// The linear first iterate on the solver's time grid.
pub fn first_iterate(
    data: &InitialData,
    params: &ModelParams,
    e: &ExponentTuple,
    engines: &Engines,
    refine: usize,
) -> Result<Trajectory> {
    check_inputs(data, params, e, engines)?;
    let mut nodes = vec![0.0];
    nodes.extend(time_grid(e.horizon, refine)?);
    first_fields(data, params, engines, &nodes).trajectory()
}

/// One Picard step from `state`.
pub fn picard_step(
    state: &Trajectory,
    data: &InitialData,
    params: &ModelParams,
    e: &ExponentTuple,
    engines: &Engines,
) -> Result<Trajectory> {
    check_inputs(data, params, e, engines)?;
    let cur = NodeFields::from_trajectory(data, state);
    let first = first_fields(data, params, engines, &cur.nodes);
    let next = integral_map(&cur, &first, params, e, engines, None)?;
    if !all_finite(&next) {
        return Err(CoreError::Diverged { iteration: 1, ratio: f64::NAN, reason: "non-finite field".into() });
    }
    next.trajectory()
}

/// Picard iteration from the linear first iterate.
pub fn solve_mild(
    data: &InitialData,
    params: &ModelParams,
    e: &ExponentTuple,
    engines: &Engines,
    opts: &SolverOptions,
) -> Result<(Trajectory, PicardDiagnostics)> {
    let start = first_iterate(data, params, e, engines, opts.refine)?;
    solve_mild_from(start, data, params, e, engines, opts)
}

/// Picard iteration from a supplied first iterate on the solver's time grid.
pub fn solve_mild_from(
    start: Trajectory,
    data: &InitialData,
    params: &ModelParams,
    e: &ExponentTuple,
    engines: &Engines,
    opts: &SolverOptions,
) -> Result<(Trajectory, PicardDiagnostics)> {
    check_inputs(data, params, e, engines)?;
    let expected = time_grid(e.horizon, opts.refine)?;
    if start.times != expected {
        return Err(CoreError::InvalidArgument("start trajectory is not on the solver time grid".into()));
    }
    let mut cur = NodeFields::from_trajectory(data, &start);
    let first = first_fields(data, params, engines, &cur.nodes);
    let mut diag = PicardDiagnostics::default();
    let norm0 = y_components(&start, e)?.total();
    diag.norms.push(norm0);
    for iter in 1..=opts.maxiter {
        let clock = Instant::now();
        let next = integral_map(&cur, &first, params, e, engines, None)?;
        let last_ratio = diag.ratios.last().copied().unwrap_or(f64::NAN);
        if !all_finite(&next) {
            return Err(CoreError::Diverged { iteration: iter, ratio: last_ratio, reason: "non-finite field".into() });
        }
        let traj = next.trajectory()?;
        let dist = y_components(&traj.difference(&cur.trajectory()?)?, e)?.total();
        let norm = y_components(&traj, e)?.total();
        diag.record(norm, dist, clock.elapsed().as_secs_f64() * 1e3);
        cur = next;
        let ratio = diag.ratios.last().copied().unwrap_or(f64::NAN);
        if !norm.is_finite() || (norm0 > 0.0 && norm > opts.guard * norm0) {
            return Err(CoreError::Diverged {
                iteration: iter,
                ratio,
                reason: format!("iterate norm {norm:.3e} exceeds {:.0e} times the first iterate", opts.guard),
            });
        }
        if dist < opts.tol {
            diag.converged = true;
            return Ok((traj, diag));
        }
    }
    Err(CoreError::NotConverged {
        iterations: opts.maxiter,
        distance: diag.distances.last().copied().unwrap_or(f64::NAN),
        trend: diag.trend(),
    })
}

/// Y-norms of the difference between a trajectory and the integral map
/// evaluated on that trajectory, per equation.
pub fn residual_check(
    traj: &Trajectory,
    data: &InitialData,
    params: &ModelParams,
    e: &ExponentTuple,
    engines: &Engines,
) -> Result<YNorms> {
    check_inputs(data, params, e, engines)?;
    let cur = NodeFields::from_trajectory(data, traj);
    let first = first_fields(data, params, engines, &cur.nodes);
    let mapped = integral_map(&cur, &first, params, e, engines, None)?;
    // The signal and velocity equations are evaluated with the trajectory's own density.
    let own = integral_map(&cur, &first, params, e, engines, Some(&cur.n))?;
    let image = NodeFields { n: mapped.n, ..own };
    y_components(&image.trajectory()?.difference(traj)?, e)
}

/// First iterate plus a perturbation of Y-size `size` along a smooth direction.
pub fn perturbed_start(
    data: &InitialData,
    params: &ModelParams,
    e: &ExponentTuple,
    engines: &Engines,
    refine: usize,
    size: f64,
) -> Result<Trajectory> {
    let start = first_iterate(data, params, e, engines, refine)?;
    let g = engines.grid();
    let bump = ScalarField::from_fn(g, |x, y| {
        (std::f64::consts::PI * x / g.lx).cos() * (std::f64::consts::PI * y / g.ly).cos()
    });
    let flow = crate::operators::leray_project(&VectorField::from_fn(g, |x, y| {
        let (sx, sy) = (x / g.lx - 0.5, y / g.ly - 0.5);
        (sy, -sx)
    }));
    let mut dir = Trajectory::zeros(g, start.times.clone())?;
    for i in 0..dir.len() {
        let t = dir.times[i];
        let decay = (-t).exp();
        dir.n[i] = bump.scaled(decay);
        dir.c[i] = bump.scaled(0.5 * decay);
        dir.v[i] = bump.scaled(0.5 * decay);
        dir.u[i] = flow.scaled(decay);
    }
    let scale = size / y_components(&dir, e)?.total();
    let mut out = start.clone();
    for i in 0..out.len() {
        out.n[i] = out.n[i].axpy(scale, &dir.n[i]);
        out.c[i] = out.c[i].axpy(scale, &dir.c[i]);
        out.v[i] = out.v[i].axpy(scale, &dir.v[i]);
        out.u[i] = out.u[i].axpy(scale, &dir.u[i]);
    }
    Ok(out)
}
