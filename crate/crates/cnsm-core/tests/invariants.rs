use cnsm_core::norms::{lp_norm, quotient_norm, time_grid, y_norm, ExponentTuple, Trajectory};
use cnsm_core::operators::{
    build_grid, leray_project, neumann_laplacian, neumann_spectrum, solenoidal_dimension, stokes_operator,
    stokes_spectrum, Calculus, Grid, ScalarField, VectorField,
};
use cnsm_core::semigroups::{HeatEngine, StokesEngine};
use cnsm_core::theory_verifier::{
    check_exponents, default_decay_times, verify_beta_bound, verify_decay, BetaCase, Case, DecayCorpus, EstimateId,
    Theorem,
};
use proptest::prelude::*;
use std::sync::OnceLock;

const NX: usize = 10;
const NY: usize = 8;

fn grid() -> Grid {
    build_grid(1.0, 1.3, NX, NY).unwrap()
}

fn heat() -> &'static HeatEngine {
    static CELL: OnceLock<HeatEngine> = OnceLock::new();
    CELL.get_or_init(|| {
        let g = grid();
        HeatEngine::new(neumann_spectrum(&neumann_laplacian(g), g.len()).unwrap()).unwrap()
    })
}

fn stokes() -> &'static StokesEngine {
    static CELL: OnceLock<StokesEngine> = OnceLock::new();
    CELL.get_or_init(|| {
        let g = grid();
        StokesEngine::new(stokes_spectrum(&stokes_operator(g), solenoidal_dimension(&g)).unwrap()).unwrap()
    })
}

fn scalar() -> impl Strategy<Value = ScalarField> {
    proptest::collection::vec(-3.0f64..3.0, NX * NY).prop_map(|v| {
        let g = grid();
        ScalarField::new(g, ndarray::Array2::from_shape_vec(g.shape(), v).unwrap()).unwrap()
    })
}

fn vector() -> impl Strategy<Value = VectorField> {
    (scalar(), scalar()).prop_map(|(a, b)| VectorField::from_components(a, b).unwrap())
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(2.0), Just(f64::INFINITY), 1.1f64..8.0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn quotient_norm_ignores_constants(f in scalar(), k in -10.0f64..10.0, p in exponent()) {
        let a = quotient_norm(&f, p).unwrap().0;
        let b = quotient_norm(&f.shifted(k), p).unwrap().0;
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0), "{a} vs {b}");
    }

    #[test]
    fn quotient_norm_is_a_lower_bound(f in scalar(), c in -5.0f64..5.0, p in exponent(), s in -4.0f64..4.0) {
        let (q, shift) = quotient_norm(&f, p).unwrap();
        prop_assert!(q <= lp_norm(&f.shifted(c), p).unwrap() * (1.0 + 1e-12) + 1e-12);
        prop_assert!((lp_norm(&f.shifted(shift), p).unwrap() - q).abs() <= 1e-12 * q.max(1.0));
        let scaled = quotient_norm(&f.scaled(s), p).unwrap().0;
        prop_assert!((scaled - s.abs() * q).abs() <= 1e-9 * q.max(1.0));
    }

    #[test]
    fn heat_keeps_mass_and_contracts(f in scalar(), t in 1e-4f64..2.0, s in 1e-4f64..1.0) {
        let h = heat();
        let out = h.heat_apply(t, &f).unwrap();
        prop_assert!((out.integral() - f.integral()).abs() <= 1e-12 * (1.0 + f.dot(&f).sqrt()));
        prop_assert!(out.dot(&out) <= f.dot(&f) * (1.0 + 1e-12));
        let two = h.heat_apply(s, &out).unwrap();
        let one = h.heat_apply(s + t, &f).unwrap();
        prop_assert!((&two - &one).max_abs() <= 1e-10 * f.max_abs());
    }

    #[test]
    fn projection_is_orthogonal_and_idempotent(w in vector()) {
        let pw = leray_project(&w);
        let rest = &w - &pw;
        prop_assert!(pw.dot(&rest).abs() <= 1e-10 * w.dot(&w));
        prop_assert!((&leray_project(&pw) - &pw).max_abs() <= 1e-10 * w.max_abs());
        prop_assert!(Calculus::new(w.grid).max_divergence(&pw).unwrap() <= 1e-9 * w.max_abs());
    }

    #[test]
    fn stokes_flow_stays_solenoidal_and_contracts(w in vector(), t in 1e-4f64..1.0) {
        let s = stokes();
        let pw = leray_project(&w);
        let out = s.stokes_apply(t, &pw).unwrap();
        prop_assert!(out.dot(&out) <= pw.dot(&pw) * (1.0 + 1e-12));
        let forced = s.stokes_forced_apply(t, &w).unwrap();
        prop_assert!(Calculus::new(w.grid).max_divergence(&forced).unwrap() <= 1e-9 * w.max_abs());
    }

    #[test]
    fn larger_density_exponent_stays_admissible(q in 1.05f64..1.95, extra in 0.0f64..50.0, frac in 0.01f64..0.99) {
        let r_hi = 2.0 * q / (2.0 - q);
        let r = 2.0 + frac * (r_hi - 2.0);
        let p = q / (q - 1.0) * (1.0 + 1e-9);
        let e = ExponentTuple { dim: 2, p, q, r, s: f64::INFINITY, horizon: 1.0, infinite_horizon: false };
        let base = check_exponents(&e, Theorem::T1, Case::III);
        prop_assert!(base.pass, "{:?}", base.violations);
        let wider = check_exponents(&ExponentTuple { p: p + extra, ..e }, Theorem::T1, Case::III);
        prop_assert!(wider.pass);
        let beyond = check_exponents(&ExponentTuple { r: r_hi * (1.0 + 1e-9) + extra, ..e }, Theorem::T1, Case::III);
        prop_assert!(!beyond.pass);
    }

    #[test]
    fn damped_beta_bound_holds(x in -0.9f64..0.95, y in -0.9f64..0.95, a in 0.05f64..5.0, b in 0.05f64..5.0, t in 0.01f64..10.0) {
        let c = verify_beta_bound(BetaCase { x, y, a, b, t }, 1e-10).unwrap();
        prop_assert!(c.pass, "{c:?}");
        if a == b {
            prop_assert!((c.lhs - c.rhs).abs() <= 1e-8 * c.rhs);
        }
    }

    #[test]
    fn y_norm_is_absolutely_homogeneous(f in scalar(), w in vector(), s in -3.0f64..3.0) {
        let g = grid();
        let times = time_grid(1.0, 1).unwrap();
        let m = times.len();
        let decay: Vec<f64> = times.iter().map(|t| (-t).exp()).collect();
        let n = decay.iter().map(|d| f.scaled(*d)).collect();
        let c = decay.iter().map(|d| f.scaled(0.5 * d)).collect();
        let u = decay.iter().map(|d| leray_project(&w).scaled(*d)).collect();
        let traj = Trajectory::new(times, n, c, vec![ScalarField::zeros(g); m], u).unwrap();
        let e = ExponentTuple { dim: 2, p: 4.0, q: 1.5, r: 3.0, s: f64::INFINITY, horizon: 1.0, infinite_horizon: false };
        let base = y_norm(&traj, &e).unwrap();
        let scaled = y_norm(&traj.scaled(s), &e).unwrap();
        prop_assert!((scaled - s.abs() * base).abs() <= 1e-12 * base.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn envelope_grows_with_the_corpus(seed in 0u64..1000, m in 2usize..8) {
        let g = grid();
        let full = DecayCorpus::new(g, seed);
        let small = full.truncated(m);
        let large = full.truncated(m + 4);
        let times = default_decay_times();
        for est in [EstimateId::C0, EstimateId::C2, EstimateId::C4] {
            let s = verify_decay(heat(), Some(stokes()), est, 4.0, 2.0, &small, &times).unwrap();
            let l = verify_decay(heat(), Some(stokes()), est, 4.0, 2.0, &large, &times).unwrap();
            prop_assert!(s.envelope <= l.envelope);
            prop_assert!(s.all_finite() && l.all_finite());
        }
    }
}
