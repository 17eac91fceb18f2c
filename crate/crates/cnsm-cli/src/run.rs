//! Subcommand orchestration and report files.

use crate::config::{DataPreset, ModelMode, ProfileSpec, RunConfig};
use crate::error::{CliError, CliResult};
use crate::snapshot::Snapshot;
use cnsm_core::mild_solver::{residual_check, solve_mild, Engines, ModelParams, PicardDiagnostics, SolverOptions};
use cnsm_core::norms::{
    weighted_samples, x_norm, y_components, yexp_norm, DecayRates, ExponentTuple, InitialData, SampleNorms,
    Trajectory, YNorms, YexpReport,
};
use cnsm_core::operators::{
    build_grid, leray_project, neumann_laplacian, neumann_spectrum, solenoidal_dimension, stokes_operator,
    stokes_spectrum, Grid, ScalarField, VectorField,
};
use cnsm_core::semigroups::{HeatEngine, StokesEngine};
use cnsm_core::theory_verifier::{
    beta_grid, check_exponents_tagged, default_decay_times, default_direction, fit_decay_rates, threshold_search,
    verify_beta_bound, verify_decay, BetaCheck, ConditionVerdict, DecayCorpus, DecayEnvelopeReport, EstimateId,
    RateFit, ThresholdResult, CORPUS_MIX,
};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Simulate,
    VerifyDecay,
    VerifyBeta,
    CheckExponents,
    ThresholdSearch,
    FitRates,
}

/// Outcome summary written to `verdict.txt`.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub pass: bool,
    pub lines: Vec<String>,
}

impl Verdict {
    pub fn render(&self) -> String {
        let mut s = String::from(if self.pass { "PASS\n" } else { "FAIL\n" });
        for l in &self.lines {
            s.push_str(l);
            s.push('\n');
        }
        s
    }
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

/// Runs one subcommand, writing its reports, the normalized config and
/// `verdict.txt` into `out`.
pub fn run(cmd: Command, cfg: &RunConfig, out: &Path) -> CliResult<Verdict> {
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    write_file(&out.join("config.toml"), &cfg.dump())?;
    let verdict = match cmd {
        Command::Simulate => simulate(cfg, Some(out))?.verdict(),
        Command::VerifyDecay => verify_decay_cmd(cfg, Some(out))?.verdict(),
        Command::VerifyBeta => verify_beta_cmd(cfg, Some(out))?.verdict(),
        Command::CheckExponents => check_exponents_cmd(cfg, Some(out))?.verdict(),
        Command::ThresholdSearch => threshold_cmd(cfg, Some(out))?.verdict(),
        Command::FitRates => fit_rates_cmd(cfg, Some(out))?.verdict(),
    };
    write_file(&out.join("verdict.txt"), &verdict.render())?;
    Ok(verdict)
}

pub fn grid_of(cfg: &RunConfig) -> CliResult<Grid> {
    Ok(build_grid(cfg.grid.lx, cfg.grid.ly, cfg.grid.nx, cfg.grid.ny)?)
}

pub fn model_params(cfg: &RunConfig, grid: Grid) -> ModelParams {
    let m = &cfg.model;
    let (sigma, mu) = match m.mode {
        ModelMode::Logistic => (m.sigma, m.mu),
        ModelMode::Decay => (-m.sigma_tilde, 0.0),
    };
    ModelParams {
        chi: m.chi,
        xi: m.xi,
        alpha1: m.alpha1,
        alpha2: m.alpha2,
        beta1: m.beta1,
        beta2: m.beta2,
        gamma: m.gamma,
        sigma,
        mu,
        kappa1: m.kappa1,
        kappa2: m.kappa2,
        phi_grad: VectorField::constant(grid, m.gx, m.gy),
    }
}

/// Grid, semigroups, exponents and coefficients shared by the solver commands.
pub struct Setup {
    pub grid: Grid,
    pub engines: Engines,
    pub tuple: ExponentTuple,
    pub params: ModelParams,
    /// Present in decay mode.
    pub rates: Option<DecayRates>,
    pub opts: SolverOptions,
}

pub fn setup(cfg: &RunConfig) -> CliResult<Setup> {
    let grid = grid_of(cfg)?;
    let engines = Engines::new(grid, cfg.solver.kmax)?;
    let params = model_params(cfg, grid);
    let (tuple, rates) = match cfg.model.mode {
        ModelMode::Logistic => {
            params.validate()?;
            (cfg.exponents.tuple(cfg.exponents.horizon.unwrap_or(1.0), false), None)
        }
        ModelMode::Decay => {
            params.validate_decay_mode()?;
            let rates = DecayRates {
                sigma_tilde: cfg.model.sigma_tilde,
                kappa1_beta1: f64::from(cfg.model.kappa1) * cfg.model.beta1,
                beta2: cfg.model.beta2,
                rho2: engines.stokes.gap(),
            };
            let slowest = rates.weights().into_iter().filter(|w| *w > 0.0).fold(f64::INFINITY, f64::min);
            let horizon = match cfg.exponents.horizon {
                Some(h) => h,
                None if slowest.is_finite() => 20.0 / slowest,
                None => return Err(CliError::Invalid("decay mode needs a horizon when every rate is zero".into())),
            };
            (cfg.exponents.tuple(horizon, true), Some(rates))
        }
    };
    let opts = SolverOptions {
        tol: cfg.solver.tol,
        maxiter: cfg.solver.maxiter,
        guard: cfg.solver.guard,
        refine: cfg.solver.time_refine,
    };
    Ok(Setup { grid, engines, tuple, params, rates, opts })
}

fn scalar_profile(spec: &ProfileSpec, grid: Grid, name: &str) -> CliResult<ScalarField> {
    let (lx, ly) = (grid.lx, grid.ly);
    Ok(match spec {
        ProfileSpec::Zero => ScalarField::zeros(grid),
        ProfileSpec::Constant { amplitude } => ScalarField::constant(grid, *amplitude),
        ProfileSpec::Cosine { amplitude, j, k } => ScalarField::from_fn(grid, |x, y| {
            amplitude * (*j as f64 * PI * x / lx).cos() * (*k as f64 * PI * y / ly).cos()
        }),
        ProfileSpec::Gaussian { amplitude, x0, y0, width } => ScalarField::from_fn(grid, |x, y| {
            let (dx, dy) = (x / lx - x0, y / ly - y0);
            amplitude * (-(dx * dx + dy * dy) / (width * width)).exp()
        }),
        ProfileSpec::Snapshot { path } => match Snapshot::read(path)? {
            Snapshot::Scalar(f) if f.grid == grid => f,
            Snapshot::Scalar(_) => return Err(CliError::Invalid(format!("data.{name}: snapshot grid differs from the run grid"))),
            Snapshot::Vector(_) => return Err(CliError::Invalid(format!("data.{name}: snapshot holds a vector field"))),
        },
        ProfileSpec::Vortex { .. } => return Err(CliError::Invalid(format!("data.{name}: vortex is a velocity profile"))),
    })
}

fn vector_profile(spec: &ProfileSpec, grid: Grid) -> CliResult<VectorField> {
    let (lx, ly) = (grid.lx, grid.ly);
    Ok(match spec {
        ProfileSpec::Zero => VectorField::zeros(grid),
        ProfileSpec::Vortex { amplitude, x0, y0, width } => leray_project(&VectorField::from_fn(grid, |x, y| {
            let (dx, dy) = (x / lx - x0, y / ly - y0);
            let r = amplitude * (-(dx * dx + dy * dy) / (width * width)).exp();
            (-dy * r, dx * r)
        })),
        ProfileSpec::Snapshot { path } => match Snapshot::read(path)? {
            Snapshot::Vector(f) if f.grid == grid => f,
            Snapshot::Vector(_) => return Err(CliError::Invalid("data.u0: snapshot grid differs from the run grid".into())),
            Snapshot::Scalar(_) => return Err(CliError::Invalid("data.u0: snapshot holds a scalar field".into())),
        },
        _ => return Err(CliError::Invalid("data.u0: only zero, vortex or snapshot profiles are solenoidal".into())),
    })
}

/// Assembles the initial data, rescaled to `data.x_norm` when given.
pub fn initial_data(cfg: &RunConfig, s: &Setup) -> CliResult<InitialData> {
    let d = &cfg.data;
    let data = match d.preset {
        Some(DataPreset::Bump) => default_direction(s.grid, &s.tuple, &s.engines)?,
        None => InitialData {
            n0: scalar_profile(&d.n0, s.grid, "n0")?,
            c0: scalar_profile(&d.c0, s.grid, "c0")?,
            v0: scalar_profile(&d.v0, s.grid, "v0")?,
            u0: vector_profile(&d.u0, s.grid)?,
        },
    };
    match d.x_norm {
        None => Ok(data),
        Some(target) => {
            let size = x_norm(&data, &s.tuple, &s.engines.heat)?;
            if size == 0.0 {
                if target == 0.0 {
                    return Ok(data);
                }
                return Err(CliError::Invalid("data.x_norm set but the data profiles are all zero".into()));
            }
            Ok(data.scaled(target / size))
        }
    }
}

/// Result of the `simulate` command.
pub struct SimulateReport {
    pub x_norm: f64,
    pub trajectory: Trajectory,
    pub diagnostics: PicardDiagnostics,
    pub y: YNorms,
    pub residual: YNorms,
    pub yexp: Option<YexpReport>,
    pub tol: f64,
}

impl SimulateReport {
    pub fn verdict(&self) -> Verdict {
        let d = &self.diagnostics;
        let mut lines = vec![
            format!("x_norm = {}", num(self.x_norm)),
            format!("iterations = {}", d.iterations()),
            format!("final_distance = {}", num(d.distances.last().copied().unwrap_or(0.0))),
            format!("ratio_trend = {}", num(d.trend())),
            format!("y_norm = {}", num(self.y.total())),
        ];
        for (name, v) in ["n", "c", "v", "u"].iter().zip(self.residual.components()) {
            lines.push(format!("residual_{name} = {}", num(v)));
        }
        if let Some(r) = &self.yexp {
            lines.push(format!("yexp_norm = {}", num(r.total())));
            lines.push(format!("yexp_bounded = {}", r.bounded()));
        }
        Verdict { pass: d.converged && self.yexp.as_ref().is_none_or(|r| r.total().is_finite()), lines }
    }
}

fn norms_csv(samples: &[SampleNorms], rates: Option<&DecayRates>) -> String {
    let w = rates.map_or([0.0; 4], |r| r.weights());
    let mut s = String::from("t,component,weighted_norm\n");
    for smp in samples {
        let e = |k: usize| (w[k] * smp.t).exp();
        let vals = [smp.n * e(0), smp.c * e(1), smp.grad_c, smp.v * e(2), smp.grad_v, smp.u * e(3)];
        for (name, v) in SampleNorms::COMPONENTS.iter().zip(vals) {
            let _ = writeln!(s, "{},{name},{}", num(smp.t), num(v));
        }
    }
    s
}

fn diagnostics_csv(d: &PicardDiagnostics, wall_clock: bool) -> String {
    let mut s = String::from("iter,y_distance,ratio,wall_ms\n");
    for (i, dist) in d.distances.iter().enumerate() {
        let ratio = if i == 0 { String::new() } else { num(d.ratios[i - 1]) };
        let wall = if wall_clock { format!("{:.3}", d.wall_ms[i]) } else { "0".into() };
        let _ = writeln!(s, "{},{},{ratio},{wall}", i + 1, num(*dist));
    }
    s
}

fn write_snapshots(cfg: &RunConfig, traj: &Trajectory, out: &Path) -> CliResult<()> {
    for &t in &cfg.output.snapshot_times {
        let i = (0..traj.len())
            .min_by(|&a, &b| (traj.times[a] - t).abs().total_cmp(&(traj.times[b] - t).abs()))
            .expect("nonempty trajectory");
        let tag = format!("t{i:04}");
        Snapshot::Scalar(traj.n[i].clone()).write(&out.join(format!("n_{tag}.cnsm")))?;
        Snapshot::Scalar(traj.c[i].clone()).write(&out.join(format!("c_{tag}.cnsm")))?;
        Snapshot::Scalar(traj.v[i].clone()).write(&out.join(format!("v_{tag}.cnsm")))?;
        Snapshot::Vector(traj.u[i].clone()).write(&out.join(format!("u_{tag}.cnsm")))?;
    }
    Ok(())
}

/// Solves the mild problem for the configured data.
pub fn simulate(cfg: &RunConfig, out: Option<&Path>) -> CliResult<SimulateReport> {
    let s = setup(cfg)?;
    simulate_with(cfg, &s, out)
}

pub fn simulate_with(cfg: &RunConfig, s: &Setup, out: Option<&Path>) -> CliResult<SimulateReport> {
    let data = initial_data(cfg, s)?;
    let x = x_norm(&data, &s.tuple, &s.engines.heat)?;
    let (traj, diag) = solve_mild(&data, &s.params, &s.tuple, &s.engines, &s.opts)?;
    let y = y_components(&traj, &s.tuple)?;
    let residual = residual_check(&traj, &data, &s.params, &s.tuple, &s.engines)?;
    let yexp = s.rates.as_ref().map(|r| yexp_norm(&traj, &s.tuple, r)).transpose()?;
    if let Some(out) = out {
        let samples = weighted_samples(&traj, &s.tuple)?;
        write_file(&out.join("norms.csv"), &norms_csv(&samples, s.rates.as_ref()))?;
        write_file(&out.join("diagnostics.csv"), &diagnostics_csv(&diag, cfg.output.wall_clock))?;
        write_snapshots(cfg, &traj, out)?;
    }
    Ok(SimulateReport { x_norm: x, trajectory: traj, diagnostics: diag, y, residual, yexp, tol: s.opts.tol })
}

/// Result of the `fit-rates` command.
pub struct FitRatesReport {
    pub simulation: SimulateReport,
    pub fits: Vec<RateFit>,
    pub margin: f64,
}

impl FitRatesReport {
    pub fn verdict(&self) -> Verdict {
        let mut v = self.simulation.verdict();
        for f in &self.fits {
            v.lines.push(format!(
                "rate_{} = {} (weight {}, {:?})",
                f.component,
                num(f.fitted_rate),
                num(f.weight_rate),
                f.status
            ));
        }
        v.pass = v.pass && self.fits.iter().all(|f| f.meets(self.margin));
        v
    }
}

pub fn fit_rates_cmd(cfg: &RunConfig, out: Option<&Path>) -> CliResult<FitRatesReport> {
    if cfg.model.mode != ModelMode::Decay {
        return Err(CliError::Invalid("fit-rates needs model.mode = \"decay\"".into()));
    }
    let s = setup(cfg)?;
    let simulation = simulate_with(cfg, &s, out)?;
    let rates = s.rates.expect("decay mode");
    let fits = fit_decay_rates(&simulation.trajectory, &s.tuple, &rates)?;
    if let Some(out) = out {
        let mut csv = String::from("component,status,fitted_rate,weight_rate,residual_rate,samples\n");
        for f in &fits {
            let status = match f.status {
                cnsm_core::theory_verifier::FitStatus::Fitted => "fitted",
                cnsm_core::theory_verifier::FitStatus::ExactlyZero => "exactly-zero",
                cnsm_core::theory_verifier::FitStatus::BelowFloor { .. } => "below-floor",
            };
            let _ = writeln!(
                csv,
                "{},{status},{},{},{},{}",
                f.component,
                num(f.fitted_rate),
                num(f.weight_rate),
                num(f.residual_rate),
                f.samples
            );
        }
        write_file(&out.join("rates.csv"), &csv)?;
    }
    Ok(FitRatesReport { simulation, fits, margin: cfg.rates.margin })
}

/// Result of the `verify-decay` command.
pub struct DecayReport {
    pub reports: Vec<DecayEnvelopeReport>,
}

impl DecayReport {
    pub fn verdict(&self) -> Verdict {
        let lines = self
            .reports
            .iter()
            .map(|r| {
                format!(
                    "{} p={} q={} envelope={} finite={} excluded={}",
                    r.estimate,
                    num(r.p),
                    num(r.q),
                    num(r.envelope),
                    r.all_finite(),
                    r.excluded
                )
            })
            .collect();
        Verdict { pass: self.reports.iter().all(|r| r.all_finite()), lines }
    }
}

/// Heat and Stokes engines over every discrete mode.
pub fn full_engines(grid: Grid) -> CliResult<(HeatEngine, StokesEngine)> {
    let heat = HeatEngine::new(neumann_spectrum(&neumann_laplacian(grid), grid.len())?)?;
    let stokes = StokesEngine::new(stokes_spectrum(&stokes_operator(grid), solenoidal_dimension(&grid))?)?;
    Ok((heat, stokes))
}

pub fn verify_decay_cmd(cfg: &RunConfig, out: Option<&Path>) -> CliResult<DecayReport> {
    let grid = grid_of(cfg)?;
    let estimates: Vec<EstimateId> =
        cfg.decay.estimates.iter().map(|t| t.parse()).collect::<Result<_, _>>()?;
    let total: usize = CORPUS_MIX.iter().sum();
    if cfg.decay.corpus_size > total {
        return Err(CliError::Invalid(format!("decay.corpus_size is at most {total}")));
    }
    let corpus = DecayCorpus::new(grid, cfg.seed).truncated(cfg.decay.corpus_size);
    let heat = HeatEngine::new(neumann_spectrum(&neumann_laplacian(grid), grid.len())?)?;
    let needs_stokes = estimates.iter().any(|e| e.is_stokes());
    let stokes = if needs_stokes {
        Some(StokesEngine::new(stokes_spectrum(&stokes_operator(grid), solenoidal_dimension(&grid))?)?)
    } else {
        None
    };
    let times = default_decay_times();
    let mut reports = Vec::new();
    for est in &estimates {
        for &[p, q] in &cfg.decay.pairs {
            if est.admits(p, q) {
                reports.push(verify_decay(&heat, stokes.as_ref(), *est, p, q, &corpus, &times)?);
            }
        }
    }
    if let Some(out) = out {
        let mut csv = String::from("estimate,p,q,sample,envelope,excluded,tail_energy\n");
        for r in &reports {
            for (i, (env, row)) in r.sample_envelopes().iter().zip(&r.ratios).enumerate() {
                let excluded = row.iter().filter(|v| v.is_none()).count();
                let _ = writeln!(
                    csv,
                    "{},{},{},{i},{},{excluded},{}",
                    r.estimate,
                    num(r.p),
                    num(r.q),
                    num(*env),
                    num(r.tail_energy[i])
                );
            }
        }
        write_file(&out.join("decay.csv"), &csv)?;
    }
    Ok(DecayReport { reports })
}

pub struct BetaReport {
    pub checks: Vec<BetaCheck>,
}

impl BetaReport {
    pub fn verdict(&self) -> Verdict {
        let passed = self.checks.iter().filter(|c| c.pass).count();
        Verdict { pass: passed == self.checks.len(), lines: vec![format!("passed = {passed}/{}", self.checks.len())] }
    }
}

pub fn verify_beta_cmd(cfg: &RunConfig, out: Option<&Path>) -> CliResult<BetaReport> {
    let checks: Vec<BetaCheck> = beta_grid(cfg.beta.points, cfg.seed)
        .into_iter()
        .map(|c| verify_beta_bound(c, cfg.beta.quad_tol))
        .collect::<Result<_, _>>()?;
    if let Some(out) = out {
        let mut csv = String::from("x,y,a,b,t,lhs,rhs,degree,pass\n");
        for c in &checks {
            let k = c.case;
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{},{},{}",
                num(k.x),
                num(k.y),
                num(k.a),
                num(k.b),
                num(k.t),
                num(c.lhs),
                num(c.rhs),
                c.degree,
                c.pass
            );
        }
        write_file(&out.join("beta.csv"), &csv)?;
    }
    Ok(BetaReport { checks })
}

pub struct ExponentReport {
    pub verdict: ConditionVerdict,
}

impl ExponentReport {
    pub fn verdict(&self) -> Verdict {
        let v = &self.verdict;
        let mut lines = vec![format!(
            "theorem {} case ({}) N={} p={} q={} r={} s={}",
            v.theorem,
            v.case,
            v.tuple.dim,
            v.tuple.p,
            v.tuple.q,
            v.tuple.r,
            v.tuple.s
        )];
        lines.extend(v.violations.iter().map(|m| format!("violation: {m}")));
        lines.extend(v.system_violations().map(|c| format!("estimate {} broken by {}", c.estimate, c.inequality)));
        Verdict { pass: v.pass, lines }
    }
}

pub fn check_exponents_cmd(cfg: &RunConfig, out: Option<&Path>) -> CliResult<ExponentReport> {
    let tuple = cfg.exponents.tuple(cfg.exponents.horizon.unwrap_or(1.0), false);
    let verdict = check_exponents_tagged(&tuple, &cfg.check.theorem, &cfg.check.case)?;
    if let Some(out) = out {
        let mut csv = String::from("estimate,inequality,holds\n");
        for c in &verdict.system {
            let _ = writeln!(csv, "{},{},{}", c.estimate, c.inequality, c.holds);
        }
        write_file(&out.join("exponents.csv"), &csv)?;
    }
    Ok(ExponentReport { verdict })
}

pub struct ThresholdReport {
    pub result: ThresholdResult,
}

impl ThresholdReport {
    pub fn verdict(&self) -> Verdict {
        let r = &self.result;
        Verdict {
            pass: true,
            lines: vec![
                format!("delta_hat = {}", num(r.delta_hat)),
                format!("bracket = [{}, {}]", num(r.bracket.0), num(r.bracket.1)),
                format!("runs = {}", r.trace.len()),
            ],
        }
    }
}

pub fn threshold_cmd(cfg: &RunConfig, out: Option<&Path>) -> CliResult<ThresholdReport> {
    let s = setup(cfg)?;
    let explicit = [&cfg.data.n0, &cfg.data.c0, &cfg.data.v0, &cfg.data.u0].iter().any(|p| **p != ProfileSpec::Zero);
    let direction = if explicit {
        let mut unit = cfg.clone();
        unit.data.x_norm = Some(1.0);
        initial_data(&unit, &s)?
    } else {
        default_direction(s.grid, &s.tuple, &s.engines)?
    };
    let t = &cfg.threshold;
    let result = threshold_search(&s.params, &s.tuple, &s.engines, &direction, (t.lo, t.hi), t.steps, &s.opts)?;
    if let Some(out) = out {
        let mut csv = String::from("run,amplitude,converged,iterations,outcome\n");
        for (i, p) in result.trace.iter().enumerate() {
            let _ = writeln!(csv, "{i},{},{},{},{}", num(p.amplitude), p.converged, p.iterations, p.outcome);
        }
        write_file(&out.join("threshold.csv"), &csv)?;
    }
    Ok(ThresholdReport { result })
}
