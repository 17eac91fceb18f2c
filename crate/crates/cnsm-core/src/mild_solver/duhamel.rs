//! Duhamel convolutions `int_0^t e^{a(t-s)} S(t-s) F(s) ds` by a modal
//! exponential integrator: each mode's convolution is integrated exactly
//! against the piecewise-linear interpolant of the forcing.

use crate::error::{CoreError, Result};
use crate::semigroups::Propagator;
use ndarray::Array1;

/// `phi1(z) = (e^z - 1)/z` and `phi2(z) = (e^z - 1 - z)/z^2`.
pub fn phi_functions(z: f64) -> (f64, f64) {
    if z.abs() < 0.1 {
        // Taylor series: phi_k(z) = sum_j z^j / (j + k)!.
        let (mut p1, mut p2) = (0.0, 0.0);
        let mut term = 1.0;
        for j in 0..12 {
            let jf = j as f64;
            p1 += term / (jf + 1.0);
            p2 += term / ((jf + 1.0) * (jf + 2.0));
            term *= z / (jf + 1.0);
        }
        (p1, p2)
    } else {
        let em1 = z.exp_m1();
        (em1 / z, (em1 - z) / (z * z))
    }
}

/// Node placement for a single convolution on `[0, t]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grading {
    /// Number of subintervals.
    pub intervals: usize,
    /// Order of the kernel singularity `(t - s)^(-theta)` the nodes are graded for.
    pub theta: f64,
}

impl Grading {
    pub fn new(intervals: usize, theta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&theta) {
            return Err(CoreError::InvalidArgument(format!(
                "kernel singularity of order {theta} is not integrable (need 0 <= theta < 1)"
            )));
        }
        if intervals == 0 {
            return Err(CoreError::InvalidArgument("grading needs at least one interval".into()));
        }
        Ok(Self { intervals, theta })
    }

    /// Nodes `0 = s_0 < ... < s_M = t`, clustered at `s = t` with exponent `1/(1 - theta)`.
    pub fn nodes(&self, t: f64) -> Vec<f64> {
        let g = 1.0 / (1.0 - self.theta);
        let m = self.intervals as f64;
        (0..=self.intervals).map(|i| t * (1.0 - (1.0 - i as f64 / m).powf(g))).collect()
    }
}

/// Mode coefficients of `int_0^{t_i} e^{a(t_i-s)} S(t_i-s) F(s) ds` at every node `t_i`,
/// given the forcing's mode coefficients at the nodes.
pub fn convolve_modes(rates: &[f64], shift: f64, nodes: &[f64], forcing: &[Array1<f64>]) -> Vec<Array1<f64>> {
    let k = rates.len();
    let mut out = Vec::with_capacity(nodes.len());
    let mut acc = Array1::zeros(k);
    out.push(acc.clone());
    for m in 0..nodes.len().saturating_sub(1) {
        let h = nodes[m + 1] - nodes[m];
        let (f0, f1) = (&forcing[m], &forcing[m + 1]);
        for i in 0..k {
            let z = -(rates[i] - shift) * h;
            let (p1, p2) = phi_functions(z);
            acc[i] = z.exp() * acc[i] + h * ((p1 - p2) * f0[i] + p2 * f1[i]);
        }
        out.push(acc.clone());
    }
    out
}

/// Duhamel integrals at every node for forcing fields sampled at the nodes.
pub fn duhamel_nodes<P: Propagator>(
    engine: &P,
    shift: f64,
    nodes: &[f64],
    forcing: &[P::Field],
) -> Result<Vec<P::Field>> {
    if nodes.len() != forcing.len() || nodes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CoreError::InvalidArgument("forcing must be sampled on increasing nodes".into()));
    }
    let coeffs: Vec<Array1<f64>> = forcing.iter().map(|f| engine.to_modes(f)).collect();
    Ok(convolve_modes(engine.rates(), shift, nodes, &coeffs).iter().map(|c| engine.from_modes(c)).collect())
}

/// `int_0^t e^{shift (t-s)} S(t-s) F(s) ds` on graded nodes.
pub fn duhamel<P: Propagator>(
    engine: &P,
    shift: f64,
    forcing: impl Fn(f64) -> Result<P::Field>,
    t: f64,
    grading: &Grading,
) -> Result<P::Field> {
    if !(t.is_finite() && t > 0.0) {
        return Err(CoreError::InvalidArgument(format!("Duhamel time must be positive, got {t}")));
    }
    let nodes = grading.nodes(t);
    let coeffs = nodes.iter().map(|&s| Ok(engine.to_modes(&forcing(s)?))).collect::<Result<Vec<_>>>()?;
    let all = convolve_modes(engine.rates(), shift, &nodes, &coeffs);
    Ok(engine.from_modes(all.last().expect("at least one node")))
}
