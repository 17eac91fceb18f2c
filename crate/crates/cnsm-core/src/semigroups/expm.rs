//! Dense matrix exponential (Pade-13 with scaling and squaring).

use super::heat::check_time;
use crate::error::{CoreError, Result};
use crate::linalg::{matmul, solve};
use crate::operators::{Grid, NeumannLaplacian, ScalarField, StokesOperator, VectorField};
use ndarray::{Array1, Array2};

/// Largest grid (cells) for which the dense heat generator may be assembled.
pub const DENSE_SCALAR_LIMIT: usize = 64 * 64;

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn one_norm(a: &Array2<f64>) -> f64 {
    a.columns().into_iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// `exp(a)` for a square matrix.
pub fn expm(a: &Array2<f64>) -> Result<Array2<f64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(CoreError::InvalidArgument("expm needs a square matrix".into()));
    }
    let norm = one_norm(a);
    if !norm.is_finite() {
        return Err(CoreError::InvalidArgument("expm input is not finite".into()));
    }
    let squarings = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a * 2f64.powi(-squarings);
    let b = &PADE13;
    let eye = Array2::<f64>::eye(n);
    let a2 = matmul(&a, &a);
    let a4 = matmul(&a2, &a2);
    let a6 = matmul(&a4, &a2);
    let inner_u = &a6 * b[13] + &a4 * b[11] + &a2 * b[9];
    let u = matmul(&a6, &inner_u) + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &eye * b[1];
    let u = matmul(&a, &u);
    let inner_v = &a6 * b[12] + &a4 * b[10] + &a2 * b[8];
    let v = matmul(&a6, &inner_v) + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &eye * b[0];
    let mut r = solve(&(&v - &u), &(&v + &u))?;
    for _ in 0..squarings {
        r = matmul(&r, &r);
    }
    Ok(r)
}

/// Fields that flatten to a dense vector (scalar: row-major cells; vector:
/// x plane then y plane).
pub trait DenseVector: Sized {
    fn grid(&self) -> Grid;
    fn flatten(&self) -> Array1<f64>;
    fn unflatten(grid: Grid, v: &Array1<f64>) -> Result<Self>;
}

impl DenseVector for ScalarField {
    fn grid(&self) -> Grid {
        self.grid
    }

    fn flatten(&self) -> Array1<f64> {
        self.values.iter().copied().collect()
    }

    fn unflatten(grid: Grid, v: &Array1<f64>) -> Result<Self> {
        let values = Array2::from_shape_vec(grid.shape(), v.to_vec())
            .map_err(|e| CoreError::InvalidArgument(e.to_string()))?;
        ScalarField::new(grid, values)
    }
}

impl DenseVector for VectorField {
    fn grid(&self) -> Grid {
        self.grid
    }

    fn flatten(&self) -> Array1<f64> {
        self.x.iter().chain(self.y.iter()).copied().collect()
    }

    fn unflatten(grid: Grid, v: &Array1<f64>) -> Result<Self> {
        let n = grid.len();
        if v.len() != 2 * n {
            return Err(CoreError::InvalidArgument("vector length mismatch".into()));
        }
        let x = Array2::from_shape_vec(grid.shape(), v.as_slice().unwrap()[..n].to_vec())
            .map_err(|e| CoreError::InvalidArgument(e.to_string()))?;
        let y = Array2::from_shape_vec(grid.shape(), v.as_slice().unwrap()[n..].to_vec())
            .map_err(|e| CoreError::InvalidArgument(e.to_string()))?;
        VectorField::new(grid, x, y)
    }
}

/// An assembled generator `G` whose semigroup is `exp(t G)`.
#[derive(Clone, Debug)]
pub struct DenseOperator {
    pub grid: Grid,
    pub generator: Array2<f64>,
}

impl DenseOperator {
    /// Heat generator: the Neumann Laplacian itself.
    pub fn heat(op: &NeumannLaplacian) -> Result<Self> {
        let g = op.grid();
        if g.len() > DENSE_SCALAR_LIMIT {
            return Err(CoreError::TooLarge(format!(
                "dense heat assembly limited to {DENSE_SCALAR_LIMIT} cells, grid has {}",
                g.len()
            )));
        }
        Ok(Self { grid: g, generator: op.dense() })
    }

    /// Stokes generator `-A` on stacked velocity planes.
    pub fn stokes(op: &StokesOperator) -> Result<Self> {
        Ok(Self { grid: op.grid(), generator: op.dense()?.mapv(|v| -v) })
    }

    /// Wraps an arbitrary square generator.
    pub fn from_matrix(grid: Grid, generator: Array2<f64>) -> Self {
        Self { grid, generator }
    }

    /// `exp(t G)` as a dense matrix.
    pub fn propagator(&self, t: f64) -> Result<Array2<f64>> {
        check_time(t, false)?;
        expm(&(&self.generator * t))
    }
}

/// `exp(t G) w` by dense matrix exponential.
pub fn expm_oracle<F: DenseVector>(op: &DenseOperator, t: f64, w: &F) -> Result<F> {
    if w.grid() != op.grid {
        return Err(CoreError::GridMismatch);
    }
    let v = w.flatten();
    if v.len() != op.generator.nrows() {
        return Err(CoreError::InvalidArgument("field size does not match operator".into()));
    }
    let e = op.propagator(t)?;
    F::unflatten(op.grid, &e.dot(&v))
}
