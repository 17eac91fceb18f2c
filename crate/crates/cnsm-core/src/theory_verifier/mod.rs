//! Numerical checks of the analytic ingredients: semigroup decay envelopes, the
//! damped beta-function bound, exponent admissibility, the small-data
//! threshold and fitted decay rates.

mod beta;
mod corpus;
mod decay;
mod exponents;
mod rates;
mod threshold;

pub use beta::{beta_function, beta_grid, verify_beta_bound, BetaCase, BetaCheck};
pub use corpus::{corpus_profiles, DecayCorpus, Profile, CORPUS_MIX};
pub use decay::{default_decay_times, envelope_change, verify_decay, DecayEnvelopeReport, EstimateId};
pub use exponents::{check_exponents, check_exponents_tagged, Case, ConditionVerdict, SystemCheck, Theorem};
pub use rates::{fit_decay_rates, ls_slope, FitStatus, RateFit, MIN_FIT_SAMPLES, ROUNDOFF_FLOOR};
pub use threshold::{default_direction, threshold_search, ThresholdProbe, ThresholdResult};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::{DecayRates, ExponentTuple, Trajectory};
    use crate::operators::{build_grid, neumann_laplacian, neumann_spectrum, ScalarField, VectorField};
    use crate::semigroups::HeatEngine;
    use std::f64::consts::PI;

    fn tuple(dim: usize, q: f64, p: f64, r: f64, s: f64) -> ExponentTuple {
        ExponentTuple { dim, p, q, r, s, horizon: 1.0, infinite_horizon: false }
    }

    #[test]
    fn beta_equality_cases() {
        for (a, t) in [(0.7, 0.3), (2.0, 1.0), (4.5, 9.0)] {
            let c = verify_beta_bound(BetaCase { x: 0.5, y: 0.5, a, b: a, t }, 1e-12).unwrap();
            let exact = (-a * t).exp() * PI;
            assert!((c.lhs - exact).abs() <= 1e-10 * exact, "{c:?}");
            assert!((c.rhs - exact).abs() <= 1e-10 * exact, "{c:?}");
            assert!(c.pass);
        }
        let c = verify_beta_bound(BetaCase { x: 0.0, y: 0.0, a: 1.0, b: 1.0, t: 1.0 }, 1e-12).unwrap();
        let e1 = (-1.0f64).exp();
        assert!((c.lhs - e1).abs() <= 1e-10 * e1 && (c.rhs - e1).abs() <= 1e-10 * e1);
    }

    #[test]
    fn beta_rejects_nonintegrable() {
        let base = BetaCase { x: 0.2, y: 0.3, a: 1.0, b: 1.0, t: 1.0 };
        assert!(verify_beta_bound(BetaCase { x: 1.0, ..base }, 1e-8).is_err());
        assert!(verify_beta_bound(BetaCase { y: 1.5, ..base }, 1e-8).is_err());
        assert!(verify_beta_bound(BetaCase { t: 0.0, ..base }, 1e-8).is_err());
    }

    #[test]
    fn beta_grid_passes_and_matches_midpoint_sum() {
        for case in beta_grid(40, 7) {
            let c = verify_beta_bound(case, 1e-8).unwrap();
            assert!(c.pass, "{c:?}");
        }
        // Independent check: midpoint sum after the substitution
        // s = t sin^2(theta), under which these exponents give a smooth integrand.
        let case = BetaCase { x: 0.5, y: -0.5, a: 1.3, b: 0.4, t: 2.5 };
        let c = verify_beta_bound(case, 1e-12).unwrap();
        let m = 200_000;
        let h = (PI / 2.0) / m as f64;
        let mut sum = 0.0;
        for i in 0..m {
            let th = (i as f64 + 0.5) * h;
            let s = case.t * th.sin().powi(2);
            let ds = 2.0 * case.t * th.sin() * th.cos();
            let f = (case.t - s).powf(-case.x) * s.powf(-case.y) * (-case.a * (case.t - s) - case.b * s).exp();
            sum += f * ds * h;
        }
        assert!((c.lhs - sum).abs() <= 1e-8 * sum, "{} vs {sum}", c.lhs);
    }

    #[test]
    fn exponent_examples() {
        let v = check_exponents(&tuple(2, 1.5, 5.0, 5.0, f64::INFINITY), Theorem::T2, Case::I);
        assert!(!v.pass);
        assert!(v.violations.iter().any(|m| m == "case (i) unavailable for N=2"));
        assert!(check_exponents(&tuple(2, 2.0, 4.0, 4.0, f64::INFINITY), Theorem::T2, Case::II).pass);
        assert!(check_exponents(&tuple(3, 2.0, 5.0, 5.0, 3.0), Theorem::T1, Case::I).pass);
        assert!(!check_exponents(&tuple(3, 2.0, 6.0, 5.0, 3.0), Theorem::T1, Case::I).pass);
        assert!(check_exponents(&tuple(3, 2.0, 5.99, 5.0, 3.0), Theorem::T1, Case::I).pass);
        assert!(check_exponents(&tuple(2, 1.5, 4.0, 3.0, f64::INFINITY), Theorem::T1, Case::III).pass);
        assert!(check_exponents_tagged(&tuple(2, 2.0, 4.0, 4.0, 1.0), "T3", "i").is_err());
        assert!(check_exponents_tagged(&tuple(2, 2.0, 4.0, 4.0, 1.0), "T2", "iv").is_err());
    }

    #[test]
    fn exponent_boundary_is_exclusive() {
        // T2 (i) in three dimensions with q = 2: p < Nq/(N - q) = 6.
        let q = 2.0;
        assert!(check_exponents(&tuple(3, q, 5.999, 4.0, 3.0), Theorem::T2, Case::I).pass);
        assert!(!check_exponents(&tuple(3, q, 6.0, 4.0, 3.0), Theorem::T2, Case::I).pass);
        // A vacuous p-bound in T1 (i): denominator Ns + Nq - 2sq <= 0.
        let v = check_exponents(&tuple(3, 2.9, 40.0, 4.0, f64::INFINITY), Theorem::T1, Case::I);
        assert!(v.pass, "{:?}", v.violations);
        let v = check_exponents(&tuple(2, f64::NAN, 4.0, 4.0, 1.0), Theorem::T2, Case::II);
        assert!(!v.pass);
    }

    #[test]
    fn system_reports_the_broken_estimate() {
        let v = check_exponents(&tuple(2, 2.0, 1.5, 4.0, f64::INFINITY), Theorem::T2, Case::II);
        let broken: Vec<&str> = v.system_violations().map(|c| c.estimate).collect();
        assert!(broken.contains(&"velocity") && broken.contains(&"signal sup"));
        let ok = check_exponents(&tuple(2, 2.0, 4.0, 4.0, f64::INFINITY), Theorem::T2, Case::II);
        assert_eq!(ok.system_violations().count(), 0);
    }

    #[test]
    fn single_mode_envelope_and_zero_class() {
        let g = build_grid(1.0, 1.0, 32, 32).unwrap();
        let heat = HeatEngine::new(neumann_spectrum(&neumann_laplacian(g), 64).unwrap()).unwrap();
        let mut corpus = DecayCorpus::new(g, 3).truncated(2);
        corpus.scalars[0] = ScalarField::from_fn(g, |x, _| (PI * x).cos());
        corpus.scalars[1] = ScalarField::zeros(g);
        let times = [0.01, 0.1, 0.5];
        let r = verify_decay(&heat, None, EstimateId::C0, 2.0, 2.0, &corpus, &times).unwrap();
        for v in r.ratios[0].iter() {
            assert!((v.unwrap() - 1.0).abs() < 1e-10);
        }
        assert!(r.ratios[1].iter().all(|v| v.is_none()));
        assert_eq!(r.excluded, 3);
        corpus.scalars[1] = ScalarField::constant(g, 2.0);
        let r = verify_decay(&heat, None, EstimateId::C0Quotient, 2.0, 2.0, &corpus, &times).unwrap();
        assert!(r.ratios[1].iter().all(|v| v.is_none()));
    }

    #[test]
    fn envelope_shrinks_with_corpus() {
        let g = build_grid(1.0, 1.0, 16, 16).unwrap();
        let heat = HeatEngine::new(neumann_spectrum(&neumann_laplacian(g), 256).unwrap()).unwrap();
        let corpus = DecayCorpus::new(g, 11);
        let times = default_decay_times();
        let full = verify_decay(&heat, None, EstimateId::C2, 2.0, 2.0, &corpus, &times).unwrap();
        let part = verify_decay(&heat, None, EstimateId::C2, 2.0, 2.0, &corpus.truncated(20), &times).unwrap();
        assert!(full.all_finite());
        assert!(part.envelope <= full.envelope);
    }

    #[test]
    fn synthetic_single_mode_rate() {
        let g = build_grid(1.0, 1.0, 16, 16).unwrap();
        let sigma_tilde = 0.5;
        let lambda = PI * PI;
        let mode = ScalarField::from_fn(g, |x, _| (PI * x).cos());
        let horizon = 2.0;
        let times = crate::norms::time_grid(horizon, 1).unwrap();
        let zero = ScalarField::zeros(g);
        let n: Vec<ScalarField> = times.iter().map(|t| mode.scaled((-(sigma_tilde + lambda) * t).exp())).collect();
        let m = times.len();
        let traj =
            Trajectory::new(times, n, vec![zero.clone(); m], vec![zero; m], vec![VectorField::zeros(g); m]).unwrap();
        let e = ExponentTuple { horizon, infinite_horizon: true, ..tuple(2, 2.0, 4.0, 4.0, f64::INFINITY) };
        let rates = DecayRates { sigma_tilde, kappa1_beta1: 1.0, beta2: 1.0, rho2: 1.0 };
        let fits = fit_decay_rates(&traj, &e, &rates).unwrap();
        assert_eq!(fits[0].status, FitStatus::Fitted);
        assert!((fits[0].residual_rate - lambda).abs() <= 0.02 * lambda, "{:?}", fits[0]);
        for f in &fits[1..] {
            assert_eq!(f.status, FitStatus::ExactlyZero);
        }
    }
}
