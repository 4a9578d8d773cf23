//! Shared numerical kernels: bracketed root finding, a small 2D nonlinear
//! solver, composite quadrature and the standard normal distribution.

mod newton2d;
mod normal;
mod quadrature;
mod roots;

pub use newton2d::{solve_2d, SeedBox, Solution2d};
pub use normal::{std_normal_cdf, std_normal_pdf, std_normal_quantile};
pub use quadrature::{quadrature_mean, DEFAULT_PANELS};
pub use roots::find_root;

use serde::Serialize;
use thiserror::Error;

/// Tolerances and iteration limits shared by the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    /// Convergence threshold on scaled residual norms.
    pub tol_residual: f64,
    /// Relative bracket width at which 1D root finding stops.
    pub tol_root: f64,
    pub max_iter: usize,
    /// Points per axis of the seeding grid used by [`solve_2d`].
    pub grid_points: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol_residual: 1e-10,
            tol_root: 1e-12,
            max_iter: 200,
            grid_points: 64,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), NumericsError> {
        let ok = self.tol_residual > 0.0
            && self.tol_root > 0.0
            && self.max_iter > 0
            && self.grid_points > 0;
        if ok {
            Ok(())
        } else {
            Err(NumericsError::InvalidConfig(*self))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("no sign change on [{a}, {b}]: f(a) = {fa}, f(b) = {fb}")]
    NoSignChange { a: f64, b: f64, fa: f64, fb: f64 },

    #[error("solver did not converge after {iterations} iterations (best residual {best_residual:e} at {best_point:?})")]
    NotConverged {
        iterations: usize,
        best_residual: f64,
        best_point: [f64; 2],
    },

    #[error("probability {0} outside (0, 1)")]
    InvalidProbability(f64),

    #[error("invalid solver configuration: {0:?}")]
    InvalidConfig(SolverConfig),
}
