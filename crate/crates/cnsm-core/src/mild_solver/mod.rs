//! Duhamel integrals and the Picard iteration for the coupled system.

mod duhamel;
mod params;
mod picard;
mod report;

pub use duhamel::{convolve_modes, duhamel, duhamel_nodes, phi_functions, Grading};
pub use params::{Engines, ModelParams, SolverOptions};
pub use picard::{first_iterate, perturbed_start, picard_step, residual_check, solve_mild, solve_mild_from};
pub use report::{contraction_report, ContractionReport, PicardDiagnostics};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::{time_grid, x_components, y_norm, ExponentTuple, InitialData};
    use crate::operators::*;
    use std::f64::consts::PI;

    fn tuple(horizon: f64) -> ExponentTuple {
        ExponentTuple { dim: 2, p: 4.0, q: 1.5, r: 3.0, s: f64::INFINITY, horizon, infinite_horizon: false }
    }

    fn bump(g: Grid, x0: f64, y0: f64, w: f64) -> ScalarField {
        ScalarField::from_fn(g, |x, y| (-((x - x0).powi(2) + (y - y0).powi(2)) / (w * w)).exp())
    }

    /// Trapezoid rule on nodes graded towards `s = t`, for a single evaluation time.
    fn trapezoid_oracle(
        heat: &crate::semigroups::HeatEngine,
        shift: f64,
        f: &dyn Fn(f64) -> ScalarField,
        t: f64,
        m: usize,
    ) -> ScalarField {
        let nodes: Vec<f64> = (0..=m).map(|i| t * (1.0 - (1.0 - i as f64 / m as f64).powi(3))).collect();
        let mut acc = ScalarField::zeros(heat.spectrum().grid);
        let term = |s: f64| heat.heat_apply(t - s, &f(s)).unwrap().scaled((shift * (t - s)).exp());
        let mut prev = term(nodes[0]);
        for w in nodes.windows(2) {
            let next = term(w[1]);
            acc = acc.axpy(0.5 * (w[1] - w[0]), &(&prev + &next));
            prev = next;
        }
        acc
    }

    #[test]
    fn phi_functions_are_continuous() {
        for z in [-0.1 - 1e-12, -0.1 + 1e-12, 0.1 - 1e-12, 0.1 + 1e-12] {
            let (a, b) = phi_functions(z);
            let (c, d) = phi_functions(z + 2e-12 * z.signum());
            assert!((a - c).abs() < 1e-10 && (b - d).abs() < 1e-10);
        }
        assert_eq!(phi_functions(0.0), (1.0, 0.5));
    }

    #[test]
    fn grading_rejects_non_integrable_kernels() {
        assert!(Grading::new(10, 1.0).is_err());
        assert!(Grading::new(10, -0.1).is_err());
        let n = Grading::new(8, 0.5).unwrap().nodes(2.0);
        assert_eq!(n[0], 0.0);
        assert_eq!(n[8], 2.0);
        assert!(n[8] - n[7] < n[1] - n[0]);
    }

    #[test]
    fn duhamel_of_zero_is_zero() {
        let g = build_grid(1.0, 1.0, 8, 8).unwrap();
        let e = Engines::new(g, 64).unwrap();
        let z = duhamel(&e.heat, 0.0, |_| Ok(ScalarField::zeros(g)), 1.0, &Grading::new(16, 0.5).unwrap()).unwrap();
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn single_mode_duhamel() {
        let g = build_grid(1.0, 1.0, 16, 16).unwrap();
        let e = Engines::new(g, 40).unwrap();
        let psi = ScalarField::from_fn(g, |x, y| (PI * x).cos() * (2.0 * PI * y).cos());
        let lam = 5.0 * PI * PI;
        for t in [0.01, 0.3, 2.0] {
            let d = duhamel(&e.heat, 0.0, |_| Ok(psi.clone()), t, &Grading::new(20, 0.5).unwrap()).unwrap();
            let want = psi.scaled((1.0 - (-lam * t).exp()) / lam);
            let err = (&d - &want).max_abs() / want.max_abs();
            assert!(err <= 1e-6, "t = {t}: {err}");
        }
    }

    #[test]
    fn duhamel_self_convergence_and_trapezoid_oracle() {
        let g = build_grid(1.0, 1.0, 8, 8).unwrap();
        let e = Engines::new(g, 64).unwrap();
        let f1 = bump(g, 0.3, 0.6, 0.2);
        let f2 = ScalarField::from_fn(g, |x, y| x * x - y);
        let force = |s: f64| f1.scaled((3.0 * s).cos()).axpy(s * s, &f2);
        let (t, shift) = (0.8, -0.5);
        let coarse = duhamel(&e.heat, shift, |s| Ok(force(s)), t, &Grading::new(400, 0.5).unwrap()).unwrap();
        let fine = duhamel(&e.heat, shift, |s| Ok(force(s)), t, &Grading::new(800, 0.5).unwrap()).unwrap();
        let scale = fine.max_abs();
        assert!((&coarse - &fine).max_abs() <= 1e-5 * scale);
        let oracle = trapezoid_oracle(&e.heat, shift, &force, t, 6000);
        let err = (&fine - &oracle).max_abs() / scale;
        assert!(err <= 1e-4, "oracle error {err}");
    }

    fn decoupled_params(g: Grid) -> ModelParams {
        ModelParams {
            chi: 0.0,
            xi: 0.0,
            mu: 0.0,
            kappa2: 0,
            sigma: 0.4,
            phi_grad: VectorField::zeros(g),
            ..ModelParams::unit(g, 0.0)
        }
    }

    #[test]
    fn zero_data_is_a_fixed_point() {
        let g = build_grid(1.0, 1.0, 8, 8).unwrap();
        let e = Engines::new(g, 65).unwrap();
        let data = InitialData::zeros(g);
        let params = ModelParams::unit(g, 1.0);
        let (traj, diag) = solve_mild(&data, &params, &tuple(1.0), &e, &SolverOptions::default()).unwrap();
        assert_eq!(diag.iterations(), 1);
        assert!(diag.converged);
        assert_eq!(y_norm(&traj, &tuple(1.0)).unwrap(), 0.0);
        let r = residual_check(&traj, &data, &params, &tuple(1.0), &e).unwrap();
        assert_eq!(r.total(), 0.0);
    }

    #[test]
    fn decoupled_density_follows_linear_heat_flow() {
        let g = build_grid(1.0, 1.0, 12, 12).unwrap();
        let e = Engines::new(g, 144).unwrap();
        let ex = tuple(1.0);
        let params = decoupled_params(g);
        let mut data = InitialData::zeros(g);
        data.n0 = bump(g, 0.4, 0.5, 0.2).scaled(0.1);
        data.c0 = bump(g, 0.7, 0.3, 0.3).scaled(0.05);
        let start = first_iterate(&data, &params, &ex, &e, 1).unwrap();
        let step = picard_step(&start, &data, &params, &ex, &e).unwrap();
        for (i, &t) in step.times.iter().enumerate() {
            let want = e.heat.heat_apply(t, &data.n0).unwrap().scaled((params.sigma * t).exp());
            assert!((&step.n[i] - &want).max_abs() <= 1e-12 * want.max_abs());
        }
        let (traj, _) = solve_mild(&data, &params, &ex, &e, &SolverOptions::default()).unwrap();
        let r = residual_check(&traj, &data, &params, &ex, &e).unwrap();
        assert!(r.components().iter().all(|&c| c <= 1e-4), "{r:?}");
    }

    #[test]
    fn second_signal_iterate_matches_fine_quadrature() {
        let g = build_grid(1.0, 1.0, 8, 8).unwrap();
        let e = Engines::new(g, 64).unwrap();
        let ex = tuple(1.0);
        let params = decoupled_params(g);
        let mut data = InitialData::zeros(g);
        data.n0 = bump(g, 0.35, 0.6, 0.25).scaled(1e-2);
        // Node spacing of the default grid leaves a few 1e-4 of interpolation
        // error in the forcing; four-fold refinement brings it well below.
        let refine = 4;
        let start = first_iterate(&data, &params, &ex, &e, refine).unwrap();
        let step = picard_step(&start, &data, &params, &ex, &e).unwrap();
        let density = |s: f64| {
            e.heat.heat_apply(s, &data.n0).unwrap().scaled(params.alpha2 * (params.sigma * s).exp())
        };
        for &i in &[10, 39, 50, 63] {
            let i = i * refine;
            let t = step.times[i];
            let oracle = trapezoid_oracle(&e.heat, -params.beta2, &density, t, 4000);
            let err = (&step.v[i] - &oracle).max_abs() / oracle.max_abs();
            assert!(err <= 1e-4, "t = {t}: {err}");
        }
    }

    #[test]
    fn projected_potential_forcing_ignores_constants() {
        let g = build_grid(1.0, 1.0, 16, 16).unwrap();
        let e = Engines::new(g, 120).unwrap();
        let phi = VectorField::constant(g, 0.0, -2.0);
        let n = bump(g, 0.3, 0.4, 0.2);
        let a = e.stokes.stokes_forced_apply(0.1, &phi.times(&n)).unwrap();
        let b = e.stokes.stokes_forced_apply(0.1, &phi.times(&n.shifted(3.5))).unwrap();
        assert!((&a - &b).max_abs() <= 1e-9);
        assert!(leray_project(&phi).max_abs() <= 1e-9);
    }

    #[test]
    fn divergence_form_transport_matches_advective_form() {
        let g = build_grid(1.0, 1.0, 32, 32).unwrap();
        let e = Engines::new(g, 200).unwrap();
        // Stream function with vanishing value and normal derivative on the walls.
        let s2 = |z: f64| (PI * z).sin().powi(2);
        let ds2 = |z: f64| PI * (2.0 * PI * z).sin();
        for (a, b) in [(1.0, 0.5), (-0.3, 2.0)] {
            let u = VectorField::from_fn(g, |x, y| {
                (a * s2(x) * ds2(y) + b * s2(2.0 * x) * 2.0 * PI * (4.0 * PI * y).sin(), -a * ds2(x) * s2(y))
            });
            let u = leray_project(&u);
            let n = bump(g, 0.45, 0.55, 0.2);
            let div_form = divergence(&u.times(&n));
            let grad_n = gradient(&n);
            let adv = ScalarField { grid: g, values: &u.x * &grad_n.x + &u.y * &grad_n.y };
            let t = 0.05;
            let lhs = e.heat.heat_apply(t, &div_form).unwrap();
            let rhs = e.heat.heat_apply(t, &adv).unwrap();
            let err = (&lhs - &rhs).max_abs() / rhs.max_abs();
            assert!(err <= 1e-4, "error {err}");
        }
    }

    #[test]
    fn contraction_fit_on_exact_geometric_sequence() {
        let diag = PicardDiagnostics {
            norms: vec![1.0, 1.0, 1.0, 1.0],
            distances: vec![1.0, 0.5, 0.25],
            ratios: vec![0.5, 0.5],
            wall_ms: vec![0.0; 3],
            converged: false,
        };
        let r = contraction_report(&diag, 0.01).unwrap();
        assert!((r.rho - 0.5).abs() < 1e-12);
        assert!((r.constant - 0.125).abs() < 1e-12);
        assert!(r.contracting && r.discriminant_ok);
        let short = PicardDiagnostics { distances: vec![1.0, 0.5], ..diag };
        assert!(contraction_report(&short, 0.01).is_err());
    }

    #[test]
    fn small_data_contracts_and_solves() {
        let g = build_grid(1.0, 1.0, 16, 16).unwrap();
        let e = Engines::new(g, 128).unwrap();
        let ex = tuple(1.0);
        let params = ModelParams::unit(g, 1.0);
        let data = InitialData {
            n0: bump(g, 0.5, 0.5, 0.2),
            c0: bump(g, 0.3, 0.3, 0.25),
            v0: bump(g, 0.7, 0.6, 0.25),
            u0: leray_project(&VectorField::from_fn(g, |x, y| ((PI * y).sin(), (PI * x).sin()))),
        }
        .scaled(0.05);
        let opts = SolverOptions { tol: 1e-11, ..SolverOptions::default() };
        let (traj, diag) = solve_mild(&data, &params, &ex, &e, &opts).unwrap();
        assert!(diag.converged);
        let report = contraction_report(&diag, x_components(&data, &ex, &e.heat).unwrap().ball_size()).unwrap();
        assert!(report.rho < 1.0, "{report:?}");
        let r = residual_check(&traj, &data, &params, &ex, &e).unwrap();
        assert!(r.components().iter().all(|&c| c <= 10.0 * opts.tol), "{r:?}");
        let again = picard_step(&traj, &data, &params, &ex, &e).unwrap();
        assert!(y_norm(&again.difference(&traj).unwrap(), &ex).unwrap() <= 2.0 * opts.tol);
        assert_eq!(traj.times, time_grid(1.0, 1).unwrap());
    }
}
