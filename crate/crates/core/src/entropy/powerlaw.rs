use super::{EntropyError, StressTargets};

/// Exponent `n = tau_mean / (tau_max - tau_mean)`.
pub fn powerlaw_n(targets: &StressTargets) -> Result<f64, EntropyError> {
    let n = targets.tau_mean / (targets.tau_max - targets.tau_mean);
    if n.is_finite() && n > 0.0 {
        Ok(n)
    } else {
        Err(EntropyError::InvalidTargets {
            tau_mean: targets.tau_mean,
            tau_max: targets.tau_max,
        })
    }
}

pub fn powerlaw_profile(n: f64, tau_max: f64, u: f64) -> f64 {
    tau_max * u.powf(1.0 / n)
}
