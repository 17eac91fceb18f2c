//! Numerical laboratory for mild solutions of an attraction-repulsion
//! chemotaxis system coupled to incompressible Navier-Stokes flow on a
//! rectangle.
//!
//! Fields are discretized with cell-centered cosine/sine expansions, so
//! the Neumann heat semigroup and the Stokes semigroup act diagonally on
//! mode coefficients. Everything above that layer (weighted norms, the
//! Picard iteration, the estimate checks) works with plain grid samples.

pub mod error;
pub mod linalg;
pub mod mild_solver;
pub mod norms;
pub mod operators;
pub mod semigroups;
pub mod theory_verifier;

pub use error::{CoreError, Result};
