//! Dense linear algebra on `ndarray` matrices, backed by faer.

use crate::error::{CoreError, Result};
use faer::linalg::solvers::Solve;
use faer::{Mat, MatRef, Side};
use ndarray::Array2;

fn to_faer(a: &Array2<f64>) -> Mat<f64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

fn from_faer(m: MatRef<'_, f64>) -> Array2<f64> {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m[(i, j)])
}

/// Smallest `k` eigenpairs of a symmetric matrix (only the lower triangle is read).
///
/// Returns eigenvalues in ascending order and an `n x k` matrix whose columns
/// are the matching orthonormal eigenvectors.
pub fn sym_eig_lowest(a: &Array2<f64>, k: usize) -> Result<(Vec<f64>, Array2<f64>)> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(CoreError::InvalidArgument("matrix is not square".into()));
    }
    if k == 0 || n == 0 {
        return Ok((Vec::new(), Array2::zeros((n, 0))));
    }
    let k = k.min(n);
    let eig = to_faer(a)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| CoreError::Eigensolver(format!("{e:?}")))?;
    let s = eig.S().column_vector();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[i].total_cmp(&s[j]));
    order.truncate(k);
    let u = eig.U();
    let vals = order.iter().map(|&i| s[i]).collect();
    let vecs = Array2::from_shape_fn((n, k), |(r, c)| u[(r, order[c])]);
    Ok((vals, vecs))
}

/// Solves `A X = B` for a general square `A` by LU with partial pivoting.
pub fn solve(a: &Array2<f64>, b: &Array2<f64>) -> Result<Array2<f64>> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n {
        return Err(CoreError::InvalidArgument("dimension mismatch in solve".into()));
    }
    let x = to_faer(a).partial_piv_lu().solve(to_faer(b));
    let x = from_faer(x.as_ref());
    if x.iter().all(|v| v.is_finite()) {
        Ok(x)
    } else {
        Err(CoreError::LinearSolve("singular or ill-conditioned system".into()))
    }
}

/// Matrix product for large operands.
pub fn matmul(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    let p = to_faer(a) * to_faer(b);
    from_faer(p.as_ref())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn lowest_pairs_of_small_matrix() {
        let a = array![[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]];
        let (w, v) = sym_eig_lowest(&a, 2).unwrap();
        let s2 = 2f64.sqrt();
        assert!((w[0] - (2.0 - s2)).abs() < 1e-14);
        assert!((w[1] - 2.0).abs() < 1e-14);
        let r = a.dot(&v.column(0)) - &v.column(0) * w[0];
        assert!(r.iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn eigenpairs_of_larger_matrix() {
        let n = 200;
        let a = Array2::from_shape_fn((n, n), |(i, j)| {
            ((i * 7 + j * 3) as f64).sin() + ((j * 7 + i * 3) as f64).sin() + if i == j { i as f64 } else { 0.0 }
        });
        let (w, v) = sym_eig_lowest(&a, 20).unwrap();
        assert!(w.windows(2).all(|p| p[0] <= p[1]));
        let r = a.dot(&v) - &v * &ndarray::Array1::from(w.clone());
        assert!(r.iter().all(|x| x.abs() < 1e-10));
        let g = v.t().dot(&v) - Array2::<f64>::eye(20);
        assert!(g.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn solve_recovers_known_solution() {
        let n = 120;
        let a = Array2::from_shape_fn((n, n), |(i, j)| {
            if i == j { 4.0 } else { 1.0 / (1.0 + (i + 2 * j) as f64) }
        });
        let x = Array2::from_shape_fn((n, 3), |(i, j)| ((i * 3 + j) % 7) as f64);
        let got = solve(&a, &a.dot(&x)).unwrap();
        assert!((&got - &x).iter().all(|e| e.abs() < 1e-12));
        let p = matmul(&a, &x);
        assert!((&p - &a.dot(&x)).iter().all(|e| e.abs() < 1e-12));
    }
}
