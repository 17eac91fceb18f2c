//! Heat and Stokes semigroups by eigen-expansion, plus a dense
//! matrix-exponential oracle.

mod expm;
mod heat;
mod modal;
mod stokes;

pub use expm::{expm, expm_oracle, DenseOperator, DenseVector, DENSE_SCALAR_LIMIT};
pub use heat::HeatEngine;
pub use modal::Propagator;
pub use stokes::StokesEngine;
