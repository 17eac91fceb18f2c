//! Discrete Lebesgue norms, quotient norms modulo constants, and the weighted
//! time-sup norms of the data and solution spaces.

mod lp;
mod quotient;
mod spaces;

pub use lp::{lp_norm, Pointwise};
pub use quotient::{class_product, golden_shift, quotient_norm, select_representative, QuotientClass, SHIFT_TOL};
pub use spaces::{
    log_grid, time_grid, weighted_samples, x_components, x_norm, y_components, y_norm, yexp_norm, DecayRates,
    ExponentTuple, InitialData, SampleNorms, Trajectory, Trend, XNorms, YNorms, YexpReport, TREND_GROWTH_LIMIT,
    X_SUP_SAMPLES,
};
