use super::lp::{check_exponent, lp_of};
use crate::error::Result;
use crate::operators::ScalarField;
use std::collections::HashMap;
use std::sync::Mutex;

/// Tolerance of the shift searches in the shift constant.
pub const SHIFT_TOL: f64 = 1e-10;

fn shifted_norm(f: &ScalarField, c: f64, p: f64) -> f64 {
    lp_of(f.values.iter().map(move |v| (v + c).abs()), f.grid.cell_area(), p)
}

fn median(f: &ScalarField) -> f64 {
    let mut v: Vec<f64> = f.values.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn golden_section(f: &ScalarField, p: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (-f.max(), -f.min());
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = shifted_norm(f, c, p);
    let mut fd = shifted_norm(f, d, p);
    while b - a > SHIFT_TOL {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = shifted_norm(f, c, p);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = shifted_norm(f, d, p);
        }
    }
    0.5 * (a + b)
}

/// Derivative of `c -> ||f + c||_p^p / p`, up to the cell weight and a positive scale.
fn slope(f: &ScalarField, c: f64, p: f64, scale: f64) -> f64 {
    f.values.iter().map(|v| {
        let x = (v + c) / scale;
        x.signum() * x.abs().powf(p - 1.0)
    }).sum()
}

/// Root of the (monotone) slope on `[-max f, -min f]` by the Illinois variant
/// of regula falsi.
fn stationary_shift(f: &ScalarField, p: f64) -> f64 {
    let (mut a, mut b) = (-f.max(), -f.min());
    let scale = (b - a).max(f64::MIN_POSITIVE);
    let (mut ga, mut gb) = (slope(f, a, p, scale), slope(f, b, p, scale));
    if ga >= 0.0 {
        return a;
    }
    if gb <= 0.0 {
        return b;
    }
    let mut side = 0i8;
    for _ in 0..200 {
        if b - a <= SHIFT_TOL {
            break;
        }
        let mut c = b - gb * (b - a) / (gb - ga);
        if !(c > a && c < b) {
            c = 0.5 * (a + b);
        }
        let gc = slope(f, c, p, scale);
        if gc == 0.0 {
            return c;
        }
        if gc < 0.0 {
            a = c;
            ga = gc;
            if side == -1 {
                gb *= 0.5;
            }
            side = -1;
        } else {
            b = c;
            gb = gc;
            if side == 1 {
                ga *= 0.5;
            }
            side = 1;
        }
    }
    0.5 * (a + b)
}

/// Shift `c*` minimizing `||f + c||_p` by golden-section search on `[-max f, -min f]`,
/// regardless of `p`.
pub fn golden_shift(f: &ScalarField, p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(golden_section(f, p))
}

/// `inf_c ||f + c||_p` and the minimizing shift.
///
/// Closed forms for `p` in {1, 2, inf}: minus the median, the mean, and the
/// midrange respectively; otherwise the root of the norm's derivative in the shift.
pub fn quotient_norm(f: &ScalarField, p: f64) -> Result<(f64, f64)> {
    check_exponent(p)?;
    let c = if p == 2.0 {
        -f.mean()
    } else if p == 1.0 {
        -median(f)
    } else if p.is_infinite() {
        -0.5 * (f.max() + f.min())
    } else {
        stationary_shift(f, p)
    };
    Ok((shifted_norm(f, c, p), c))
}

/// An element of `L^p / constants`, held through one representative.
#[derive(Debug)]
pub struct QuotientClass {
    pub representative: ScalarField,
    shifts: Mutex<HashMap<u64, f64>>,
}

impl Clone for QuotientClass {
    fn clone(&self) -> Self {
        let shifts = self.shifts.lock().expect("shift cache poisoned").clone();
        Self { representative: self.representative.clone(), shifts: Mutex::new(shifts) }
    }
}

impl QuotientClass {
    pub fn new(representative: ScalarField) -> Self {
        Self { representative, shifts: Mutex::new(HashMap::new()) }
    }

    /// Optimal shift for exponent `p`, cached.
    pub fn optimal_shift(&self, p: f64) -> Result<f64> {
        check_exponent(p)?;
        let key = p.to_bits();
        if let Some(&c) = self.shifts.lock().expect("shift cache poisoned").get(&key) {
            return Ok(c);
        }
        let (_, c) = quotient_norm(&self.representative, p)?;
        self.shifts.lock().expect("shift cache poisoned").insert(key, c);
        Ok(c)
    }

    pub fn norm(&self, p: f64) -> Result<f64> {
        let c = self.optimal_shift(p)?;
        Ok(shifted_norm(&self.representative, c, p))
    }
}

/// The representative whose plain `L^p` norm equals the class norm.
pub fn select_representative(q: &QuotientClass, p: f64) -> Result<ScalarField> {
    Ok(q.representative.shifted(q.optimal_shift(p)?))
}

/// Product of two classes, `[(f - mean f)(g - mean g)]`.
pub fn class_product(f: &ScalarField, g: &ScalarField) -> ScalarField {
    f.centered().mul(&g.centered())
}
