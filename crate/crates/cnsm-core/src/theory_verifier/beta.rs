use crate::error::{CoreError, Result};
use gauss_quad::GaussJacobi;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::ln_gamma;
use std::num::NonZeroUsize;

/// `B(x, y)` through log-gamma.
pub fn beta_function(x: f64, y: f64) -> f64 {
    (ln_gamma(x) + ln_gamma(y) - ln_gamma(x + y)).exp()
}

/// Parameters of one damped singular convolution
/// `int_0^t (t-s)^{-x} s^{-y} e^{-a(t-s)} e^{-b s} ds`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BetaCase {
    pub x: f64,
    pub y: f64,
    pub a: f64,
    pub b: f64,
    pub t: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BetaCheck {
    pub case: BetaCase,
    pub lhs: f64,
    /// `e^{-min(a, b) t} t^{1-x-y} B(1-x, 1-y)`.
    pub rhs: f64,
    /// Gauss-Jacobi degree at which the integral settled.
    pub degree: usize,
    pub pass: bool,
}

const MAX_DEGREE: usize = 1024;

/// Gauss-Jacobi rule on `[0, t]` for the weight `(t-s)^{-x} s^{-y}`. Only even
/// degrees are used.
fn jacobi_integral(case: &BetaCase, degree: usize) -> f64 {
    let BetaCase { x, y, a, b, t } = *case;
    let rule = GaussJacobi::new(
        NonZeroUsize::new(degree).expect("positive degree"),
        (-x).try_into().expect("x < 1"),
        (-y).try_into().expect("y < 1"),
    );
    // The rule integrates (1-u)^alpha (1+u)^beta g on [-1, 1]; rescaling the
    // weight to [0, t] contributes (t/2)^{alpha + beta}.
    let scale = (0.5 * t).powf(-x - y);
    scale * rule.integrate(0.0, t, |s| (-a * (t - s) - b * s).exp())
}

/// Evaluates both sides of the damped beta bound. The left side is refined by
/// doubling the Gauss-Jacobi degree until two successive values agree to
/// `quad_tol` relative; `pass` allows `10 quad_tol` of quadrature slack.
pub fn verify_beta_bound(case: BetaCase, quad_tol: f64) -> Result<BetaCheck> {
    let BetaCase { x, y, a, b, t } = case;
    if !(x < 1.0 && y < 1.0) || !x.is_finite() || !y.is_finite() {
        return Err(CoreError::InvalidArgument(format!(
            "non-integrable singularity: need x < 1 and y < 1, got x = {x}, y = {y}"
        )));
    }
    if !(x > -1.0 && y > -1.0) {
        return Err(CoreError::InvalidArgument(format!("exponents must exceed -1, got x = {x}, y = {y}")));
    }
    if !(a > 0.0 && b > 0.0 && t > 0.0) || !(a.is_finite() && b.is_finite() && t.is_finite()) {
        return Err(CoreError::InvalidArgument(format!("need a, b, t > 0, got a = {a}, b = {b}, t = {t}")));
    }
    if !(quad_tol > 0.0) {
        return Err(CoreError::InvalidArgument(format!("quadrature tolerance must be positive, got {quad_tol}")));
    }
    let mut degree = 16;
    let mut prev = jacobi_integral(&case, degree);
    let lhs = loop {
        let next_degree = 2 * degree;
        if next_degree > MAX_DEGREE {
            return Err(CoreError::InvalidArgument(format!(
                "Gauss-Jacobi quadrature did not settle by degree {MAX_DEGREE} for {case:?}"
            )));
        }
        let next = jacobi_integral(&case, next_degree);
        degree = next_degree;
        if (next - prev).abs() <= quad_tol * next.abs() {
            break next;
        }
        prev = next;
    };
    let rhs = (-a.min(b) * t).exp() * t.powf(1.0 - x - y) * beta_function(1.0 - x, 1.0 - y);
    Ok(BetaCheck { case, lhs, rhs, degree, pass: lhs <= rhs * (1.0 + 10.0 * quad_tol) })
}

/// Latin-hypercube sample of `n` cases over `x, y in (-1, 1)`, `a, b in (0, 5]`,
/// `t in (0, 10]`.
pub fn beta_grid(n: usize, seed: u64) -> Vec<BetaCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut axis = |lo: f64, hi: f64, open_hi: bool| -> Vec<f64> {
        let mut strata: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            strata.swap(i, rng.gen_range(0..=i));
        }
        strata
            .into_iter()
            .map(|k| {
                // Points strictly inside the stratum keep open ends open.
                let u: f64 = rng.gen_range(0.0..1.0);
                let v = (k as f64 + u.max(1e-9)) / n as f64;
                let v = if open_hi { v.min(1.0 - 1e-9) } else { v };
                lo + (hi - lo) * v
            })
            .collect()
    };
    let xs = axis(-1.0, 1.0, true);
    let ys = axis(-1.0, 1.0, true);
    let as_ = axis(0.0, 5.0, false);
    let bs = axis(0.0, 5.0, false);
    let ts = axis(0.0, 10.0, false);
    (0..n).map(|i| BetaCase { x: xs[i], y: ys[i], a: as_[i], b: bs[i], t: ts[i] }).collect()
}
