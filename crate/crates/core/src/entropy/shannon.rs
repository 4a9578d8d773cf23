use crate::numerics::{find_root, SolverConfig};

use super::{EntropyError, StressTargets};

const SERIES_CUTOFF: f64 = 0.1;
const MAX_BRACKET_DOUBLINGS: usize = 60;

/// Dimensionless mean `tau_mean / tau_max` of the exponential profile with
/// `G = lambda0 * tau_max`.
pub fn shannon_mean_ratio(g: f64) -> f64 {
    if g.abs() < SERIES_CUTOFF {
        let g2 = g * g;
        0.5 + g / 12.0
            - g * g2 / 720.0
            + g * g2 * g2 / 30_240.0
            - g * g2 * g2 * g2 / 1_209_600.0
            + g * g2 * g2 * g2 * g2 / 47_900_160.0
    } else {
        1.0 / -(-g).exp_m1() - 1.0 / g
    }
}

/// Mean-constraint residual of a solved multiplier, relative to `tau_max`.
pub fn shannon_residual(lambda0: f64, targets: &StressTargets) -> f64 {
    shannon_mean_ratio(lambda0 * targets.tau_max) - targets.tau_hat()
}

/// Multiplier `lambda0` of the exponential profile for the given targets.
pub fn solve_shannon(targets: &StressTargets, cfg: &SolverConfig) -> Result<f64, EntropyError> {
    let tau_hat = targets.tau_hat();
    let f = |g: f64| shannon_mean_ratio(g) - tau_hat;

    let mut half = 1.0;
    let mut doublings = 0;
    while f(-half) * f(half) > 0.0 {
        half *= 2.0;
        doublings += 1;
        if doublings > MAX_BRACKET_DOUBLINGS {
            return Err(EntropyError::Solver(crate::numerics::NumericsError::NoSignChange {
                a: -half,
                b: half,
                fa: f(-half),
                fb: f(half),
            }));
        }
    }
    let g = find_root(f, -half, half, cfg)?;
    Ok(g / targets.tau_max)
}

/// Exponential profile `ln(1 + (e^{lambda0 tau_max} - 1) u) / lambda0`.
pub fn shannon_profile(lambda0: f64, tau_max: f64, u: f64) -> f64 {
    if lambda0 == 0.0 {
        return tau_max * u;
    }
    if u == 0.0 {
        return 0.0;
    }
    let g = lambda0 * tau_max;
    let log_term = if g > 700.0 {
        g + (u + (1.0 - u) * (-g).exp()).ln()
    } else {
        (g.exp_m1() * u).ln_1p()
    };
    log_term / lambda0
}
