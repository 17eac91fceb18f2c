use ndarray::Array1;

/// A semigroup that is diagonal in a set of retained modes with decay rates
/// `rates[i]`: `S(t) f = sum_i exp(-rates[i] t) <f, e_i> e_i`.
pub trait Propagator {
    type Field: Clone;

    fn rates(&self) -> &[f64];

    /// Mode coefficients of a field (components outside the retained modes are dropped).
    fn to_modes(&self, f: &Self::Field) -> Array1<f64>;

    fn from_modes(&self, c: &Array1<f64>) -> Self::Field;

    /// Coefficients after time `t` with an extra growth factor `exp(shift t)`.
    fn evolve(&self, c: &Array1<f64>, t: f64, shift: f64) -> Array1<f64> {
        let mut out = c.clone();
        for (v, &l) in out.iter_mut().zip(self.rates()) {
            *v *= (-(l - shift) * t).exp();
        }
        out
    }
}
