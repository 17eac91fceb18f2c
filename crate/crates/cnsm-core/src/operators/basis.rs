//! One-dimensional cell-centered cosine (DCT-II) and sine (DST-II) bases.

use ndarray::{s, Array1, Array2};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Orthonormal (Euclidean) cosine and sine bases on `n` cell centers of `[0, len]`.
///
/// `cos` column `j` samples `cos(j pi x / len)` for `j = 0..n`; `sin` column `j - 1`
/// samples `sin(j pi x / len)` for `j = 1..=n`. Both are complete, so any grid
/// function has an exact expansion in either.
#[derive(Debug)]
pub struct Basis1d {
    pub n: usize,
    pub len: f64,
    pub cos: Array2<f64>,
    pub sin: Array2<f64>,
    /// `j pi / len` for `j = 0..=n`.
    pub wave: Vec<f64>,
    /// Differentiation matrix: maps cosine modes to sine modes.
    pub deriv: Array2<f64>,
    /// Neumann second-difference matrix with exactly zero row sums.
    pub neumann: Array2<f64>,
    /// Dirichlet second-difference matrix.
    pub dirichlet: Array2<f64>,
}

fn angle(j: usize, i: usize, n: usize) -> f64 {
    // j (2i+1) pi / (2n), reduced exactly modulo 2 pi.
    let m = (j * (2 * i + 1)) % (4 * n);
    PI * m as f64 / (2 * n) as f64
}

impl Basis1d {
    pub fn new(n: usize, len: f64) -> Self {
        let nf = n as f64;
        let cos = Array2::from_shape_fn((n, n), |(i, j)| {
            let a = if j == 0 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
            a * angle(j, i, n).cos()
        });
        let sin = Array2::from_shape_fn((n, n), |(i, jm)| {
            let j = jm + 1;
            let b = if j == n { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
            b * angle(j, i, n).sin()
        });
        let wave: Vec<f64> = (0..=n).map(|j| j as f64 * PI / len).collect();

        let scaled_cos = {
            let mut m = cos.slice(s![.., 1..n]).to_owned();
            for (c, mut col) in m.columns_mut().into_iter().enumerate() {
                col *= -wave[c + 1];
            }
            m
        };
        let deriv = sin.slice(s![.., 0..n - 1]).dot(&scaled_cos.t());

        let lam_c = Array1::from_iter((0..n).map(|j| wave[j] * wave[j]));
        let mut neumann = -(&cos * &lam_c).dot(&cos.t());
        symmetrize(&mut neumann);
        for i in 0..n {
            neumann[[i, i]] = 0.0;
            let off: f64 = neumann.row(i).sum();
            neumann[[i, i]] = -off;
        }

        let lam_s = Array1::from_iter((1..=n).map(|j| wave[j] * wave[j]));
        let mut dirichlet = -(&sin * &lam_s).dot(&sin.t());
        symmetrize(&mut dirichlet);

        Self { n, len, cos, sin, wave, deriv, neumann, dirichlet }
    }
}

fn symmetrize(m: &mut Array2<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (m[[i, j]] + m[[j, i]]);
            m[[i, j]] = v;
            m[[j, i]] = v;
        }
    }
}

type Key = (usize, u64);

fn cache() -> &'static Mutex<HashMap<Key, Arc<Basis1d>>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<Basis1d>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shared basis for `n` cells on `[0, len]`.
pub fn basis(n: usize, len: f64) -> Arc<Basis1d> {
    let key = (n, len.to_bits());
    let mut map = cache().lock().expect("basis cache poisoned");
    map.entry(key).or_insert_with(|| Arc::new(Basis1d::new(n, len))).clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_dev_from_identity(m: &Array2<f64>) -> f64 {
        let n = m.nrows();
        let mut d = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let e = if i == j { 1.0 } else { 0.0 };
                d = d.max((m[[i, j]] - e).abs());
            }
        }
        d
    }

    #[test]
    fn bases_are_orthonormal() {
        for n in [4, 7, 32] {
            let b = Basis1d::new(n, 1.3);
            assert!(max_dev_from_identity(&b.cos.t().dot(&b.cos)) < 1e-13);
            assert!(max_dev_from_identity(&b.sin.t().dot(&b.sin)) < 1e-13);
        }
    }

    #[test]
    fn derivative_of_cosine_mode() {
        let n = 16;
        let len = 2.0;
        let b = Basis1d::new(n, len);
        let h = len / n as f64;
        let f = Array1::from_iter((0..n).map(|i| (3.0 * PI * (i as f64 + 0.5) * h / len).cos()));
        let df = b.deriv.dot(&f);
        for i in 0..n {
            let x = (i as f64 + 0.5) * h;
            let exact = -3.0 * PI / len * (3.0 * PI * x / len).sin();
            assert!((df[i] - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn neumann_rows_sum_to_zero() {
        let b = Basis1d::new(24, 1.0);
        for row in b.neumann.rows() {
            let scale = row.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(row.sum().abs() <= 1e-14 * scale);
        }
    }
}
