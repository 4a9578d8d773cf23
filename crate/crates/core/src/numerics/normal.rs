use libm::erfc;
use statrs::function::erf::erfc_inv;
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use super::NumericsError;

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

pub fn std_normal_pdf(z: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * z * z).exp()
}

pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// Inverse of [`std_normal_cdf`]: a rational starting value polished with
/// one Newton step against the full-precision CDF.
pub fn std_normal_quantile(p: f64) -> Result<f64, NumericsError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(NumericsError::InvalidProbability(p));
    }
    let z = -SQRT_2 * erfc_inv(2.0 * p);
    let pdf = std_normal_pdf(z);
    if pdf > 0.0 {
        Ok(z - (std_normal_cdf(z) - p) / pdf)
    } else {
        Ok(z)
    }
}
