//! Grid, fields, differential operators and their spectra.

mod basis;
mod calculus;
mod field;
mod grid;
mod spectrum;
mod stokes;

pub use basis::{basis, Basis1d};
pub use calculus::{
    divergence, gradient, leray_project, neumann_laplacian, Calculus, NeumannLaplacian, DIV_TOL,
};
pub use field::{ScalarField, VectorField};
pub use grid::{build_grid, Grid};
pub use spectrum::{neumann_spectrum, OperatorSpectrum, SpectrumKind, ZERO_TOL};
pub use stokes::{
    solenoidal_dimension, stokes_operator, stokes_spectrum, StokesModes, StokesOperator,
    DENSE_VECTOR_LIMIT,
};

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_scalar(g: Grid, rng: &mut ChaCha8Rng) -> ScalarField {
        let mut f = ScalarField::zeros(g);
        f.values.mapv_inplace(|_| rng.gen_range(-1.0..1.0));
        f
    }

    fn random_vector(g: Grid, rng: &mut ChaCha8Rng) -> VectorField {
        VectorField::from_components(random_scalar(g, rng), random_scalar(g, rng)).unwrap()
    }

    fn interior(g: Grid, f: &ScalarField) -> ScalarField {
        let mut out = f.clone();
        for iy in 0..g.ny {
            for ix in 0..g.nx {
                let edge = ix < 2 || iy < 2 || ix + 2 >= g.nx || iy + 2 >= g.ny;
                if edge {
                    out.values[[iy, ix]] = 0.0;
                }
            }
        }
        out
    }

    #[test]
    fn laplacian_kernel_and_cosine_mode() {
        let g = build_grid(1.0, 2.0, 32, 24).unwrap();
        let op = neumann_laplacian(g);
        let k = ScalarField::constant(g, 3.7);
        assert_eq!(op.apply(&k).unwrap().max_abs(), 0.0);
        let f = ScalarField::from_fn(g, |x, _| (PI * x).cos());
        let lf = op.apply(&f).unwrap();
        let err = (&lf - &f.scaled(-PI * PI)).max_abs();
        assert!(err < 1e-10, "err {err}");
    }

    #[test]
    fn laplacian_is_symmetric_and_matches_div_grad() {
        let g = build_grid(1.0, 1.0, 16, 20).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let op = neumann_laplacian(g);
        let f = random_scalar(g, &mut rng);
        let h = random_scalar(g, &mut rng);
        let lf = op.apply(&f).unwrap();
        let lh = op.apply(&h).unwrap();
        let scale = lf.dot(&lf).sqrt() * h.dot(&h).sqrt();
        assert!((lf.dot(&h) - f.dot(&lh)).abs() <= 1e-12 * scale);
        let dg = divergence(&gradient(&f));
        assert!((&dg - &lf).max_abs() <= 1e-12 * lf.max_abs());
    }

    #[test]
    fn dense_rows_sum_to_zero() {
        let g = build_grid(1.0, 1.0, 8, 6).unwrap();
        let m = neumann_laplacian(g).dense();
        for row in m.rows() {
            let scale = row.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            assert!(row.sum().abs() <= 1e-14 * scale * 4.0);
        }
    }

    #[test]
    fn adjoint_identity() {
        let g = build_grid(1.0, 1.0, 24, 24).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            let f = random_scalar(g, &mut rng);
            let wx = interior(g, &random_scalar(g, &mut rng));
            let wy = interior(g, &random_scalar(g, &mut rng));
            let w = VectorField::from_components(wx, wy).unwrap();
            let lhs = gradient(&f).dot(&w);
            let rhs = -f.dot(&divergence(&w));
            assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn gradient_of_constant_vanishes() {
        let g = build_grid(1.0, 1.0, 8, 8).unwrap();
        let w = gradient(&ScalarField::constant(g, 2.0));
        assert!(w.max_abs() < 1e-13);
        // A constant field has nonzero normal flux, which the adjoint divergence
        // keeps as a boundary layer; its total is still zero.
        let d = divergence(&VectorField::constant(g, 1.0, -2.0));
        assert!(d.integral().abs() < 1e-12);
    }

    #[test]
    fn leray_projection_properties() {
        let g = build_grid(1.0, 1.5, 16, 20).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w = random_vector(g, &mut rng);
        let pw = leray_project(&w);
        assert!(divergence(&pw).max_abs() <= DIV_TOL);
        let ppw = leray_project(&pw);
        assert!((&ppw - &pw).max_abs() <= 1e-10);
        let cross = (&w - &pw).dot(&pw);
        assert!(cross.abs() <= 1e-10 * w.dot(&w));
        let grad = gradient(&random_scalar(g, &mut rng));
        assert!(leray_project(&grad).max_abs() <= 1e-10);
    }

    #[test]
    fn neumann_spectrum_basics() {
        let g = build_grid(1.0, 1.0, 16, 16).unwrap();
        let s = neumann_spectrum(&neumann_laplacian(g), 10).unwrap();
        assert!(s.eigenvalues[0].abs() <= ZERO_TOL);
        assert!((s.gap - PI * PI).abs() < 1e-10);
        assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let m0 = s.scalar_mode(0).unwrap();
        let dev = (m0.max() - m0.min()) / m0.max().abs();
        assert!(dev < 1e-8);
        for i in 0..10 {
            for j in 0..10 {
                let ip = s.scalar_mode(i).unwrap().dot(&s.scalar_mode(j).unwrap());
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((ip - e).abs() <= 1e-8);
            }
        }
        let s = neumann_spectrum(&neumann_laplacian(build_grid(PI, PI, 8, 8).unwrap()), 4).unwrap();
        assert!((s.gap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stokes_spectrum_small_grid() {
        let g = build_grid(1.0, 1.0, 12, 12).unwrap();
        let op = stokes_operator(g);
        let s = stokes_spectrum(&op, 20).unwrap();
        assert!(s.eigenvalues.iter().all(|&l| l >= s.gap && l > 0.0));
        for i in 0..20 {
            let v = s.vector_mode(i).unwrap();
            assert!(divergence(&v).max_abs() <= 1e-8);
            let av = op.apply(&v).unwrap();
            let r = (&av - &v.scaled(s.eigenvalues[i])).max_abs();
            assert!(r <= 1e-9 * s.eigenvalues[i] * v.max_abs(), "residual {r}");
            for j in 0..20 {
                let ip = v.dot(&s.vector_mode(j).unwrap());
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((ip - e).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn stokes_full_spectrum_matches_dense() {
        let g = build_grid(1.0, 1.0, 6, 6).unwrap();
        let op = stokes_operator(g);
        let dim = solenoidal_dimension(&g);
        let s = stokes_spectrum(&op, dim).unwrap();
        let dense = op.dense().unwrap();
        let (vals, _) = crate::linalg::sym_eig_lowest(&dense, dense.nrows()).unwrap();
        let mut nonzero: Vec<f64> = vals.into_iter().filter(|v| *v > 1e-8).collect();
        nonzero.sort_by(f64::total_cmp);
        assert_eq!(nonzero.len(), dim);
        for (a, b) in nonzero.iter().zip(&s.eigenvalues) {
            assert!((a - b).abs() <= 1e-9 * b);
        }
    }
}
