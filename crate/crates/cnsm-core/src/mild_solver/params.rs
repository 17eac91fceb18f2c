use crate::error::{CoreError, Result};
use crate::norms::{log_grid, lp_norm, ExponentTuple};
use crate::operators::{
    neumann_laplacian, neumann_spectrum, solenoidal_dimension, stokes_operator, stokes_spectrum, Grid,
    VectorField,
};
use crate::semigroups::{HeatEngine, StokesEngine};

/// Physical coefficients of the coupled system. In the decay variant `sigma`
/// holds `-sigma_tilde <= 0` and `mu = 0`.
#[derive(Clone, Debug)]
pub struct ModelParams {
    pub chi: f64,
    pub xi: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub gamma: f64,
    pub sigma: f64,
    pub mu: f64,
    pub kappa1: u8,
    pub kappa2: u8,
    /// Time-independent potential gradient.
    pub phi_grad: VectorField,
}

impl ModelParams {
    /// Unit coefficients, logistic growth `n - n^2`, both switches on and a
    /// uniform downward potential gradient of size `gravity`.
    pub fn unit(grid: Grid, gravity: f64) -> Self {
        Self {
            chi: 1.0,
            xi: 1.0,
            alpha1: 1.0,
            alpha2: 1.0,
            beta1: 1.0,
            beta2: 1.0,
            gamma: 1.0,
            sigma: 1.0,
            mu: 1.0,
            kappa1: 1,
            kappa2: 1,
            phi_grad: VectorField::constant(grid, 0.0, -gravity),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("chi", self.chi),
            ("xi", self.xi),
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("beta1", self.beta1),
            ("beta2", self.beta2),
            ("gamma", self.gamma),
            ("mu", self.mu),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(CoreError::InvalidArgument(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if !self.sigma.is_finite() {
            return Err(CoreError::InvalidArgument(format!("sigma must be finite, got {}", self.sigma)));
        }
        for (name, k) in [("kappa1", self.kappa1), ("kappa2", self.kappa2)] {
            if k > 1 {
                return Err(CoreError::InvalidArgument(format!("{name} must be 0 or 1, got {k}")));
            }
        }
        if !self.phi_grad.is_finite() {
            return Err(CoreError::InvalidArgument("potential gradient has non-finite values".into()));
        }
        Ok(())
    }

    /// Extra requirements of the global decay variant: `mu = 0`, `sigma <= 0`.
    pub fn validate_decay_mode(&self) -> Result<()> {
        self.validate()?;
        if self.mu != 0.0 || self.sigma > 0.0 {
            return Err(CoreError::InvalidArgument(format!(
                "decay mode needs mu = 0 and sigma <= 0, got mu = {}, sigma = {}",
                self.mu, self.sigma
            )));
        }
        Ok(())
    }

    /// `sup_t t^(1/2 - N/(2s)) ||grad phi||_s` over 40 log-spaced times on `[1e-4 T, T]`.
    pub fn potential_weighted_sup(&self, e: &ExponentTuple) -> Result<f64> {
        let w = 0.5 - e.dim as f64 / (2.0 * e.s);
        let norm = lp_norm(&self.phi_grad, e.s)?;
        let sup = log_grid(1e-4 * e.horizon, e.horizon, 40)
            .into_iter()
            .map(|t| t.powf(w) * norm)
            .fold(0.0, f64::max);
        if !sup.is_finite() {
            return Err(CoreError::InvalidArgument("weighted potential gradient is unbounded".into()));
        }
        Ok(sup)
    }
}

/// Heat and Stokes semigroups on one grid.
#[derive(Clone, Debug)]
pub struct Engines {
    pub heat: HeatEngine,
    pub stokes: StokesEngine,
}

impl Engines {
    /// Both engines truncated to their `kmax` lowest modes.
    pub fn new(grid: Grid, kmax: usize) -> Result<Self> {
        let heat = HeatEngine::new(neumann_spectrum(&neumann_laplacian(grid), kmax.min(grid.len()))?)?;
        let k = kmax.min(solenoidal_dimension(&grid));
        let stokes = StokesEngine::new(stokes_spectrum(&stokes_operator(grid), k)?)?;
        Ok(Self { heat, stokes })
    }

    pub fn grid(&self) -> Grid {
        self.heat.spectrum().grid
    }
}

/// Stopping rules of the Picard iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Y-distance between consecutive iterates below which the run stops.
    pub tol: f64,
    pub maxiter: usize,
    /// Abort when an iterate's Y-norm exceeds `guard` times the first iterate's.
    pub guard: f64,
    /// Time-grid refinement factor.
    pub refine: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-6, maxiter: 40, guard: 1e6, refine: 1 }
    }
}
