//! Confidence bounds around predictions, the band statistics built on them,
//! the optimized-bound search and the sample-size calibration.

mod analysis;
mod calibration;

pub use analysis::{
    class_weighted_mean, hbmes1_analyze, hbmes2_analyze, ClassAggregates, Hbmes1Report,
    Hbmes2Report, PairedDataset, SampleOcb, SamplePair, SkippedSample,
};
pub use calibration::{calibrate, CalibrationConfig, CalibrationResult, SsRecord};

use serde::Serialize;
use thiserror::Error;
use tracing::debug;

use crate::normalization::{boxcox_forward, boxcox_inverse, NormalizationError, NormalizationState};
use crate::numerics::{std_normal_quantile, NumericsError};

pub const DEFAULT_LEVEL: f64 = 95.0;
pub const DEFAULT_ZETA: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UncertaintyError {
    #[error("bound level {0} must lie strictly between 0 and 100 percent")]
    InvalidLevel(f64),
    #[error("granularity {0} must be positive and divide 100 into an integer number of steps")]
    InvalidZeta(f64),
    #[error("no points to analyse")]
    Empty,
    #[error("length mismatch: {measured} measured vs {predicted} predicted vs {bound} bound points")]
    LengthMismatch {
        measured: usize,
        predicted: usize,
        bound: usize,
    },
    #[error("predicted stress {value} at index {index} must be strictly positive")]
    NonPositivePrediction { index: usize, value: f64 },
    #[error("sample size range {min}..={max} is invalid")]
    InvalidRange { min: usize, max: usize },
    #[error("calibration needs {needed} samples but only {available} are usable")]
    InsufficientSamples { needed: usize, available: usize },
    #[error("every calibration trial failed; last error: {0}")]
    AllTrialsFailed(NormalizationError),
    #[error(transparent)]
    Normalization(#[from] NormalizationError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Two-sided bound at `level` percent around each prediction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfidenceBound {
    pub level: f64,
    pub z: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Bound ends whose transformed value fell outside the domain of the
    /// inverse transform; they are set to 0 (below) or infinity (above).
    pub clipped_points: usize,
}

/// Standard normal coefficient for a two-sided bound at `level` percent.
pub fn level_z(level: f64) -> Result<f64, UncertaintyError> {
    if !(level > 0.0 && level < 100.0) {
        return Err(UncertaintyError::InvalidLevel(level));
    }
    Ok(std_normal_quantile(0.5 + level / 200.0)?)
}

/// Inverse transform extended monotonically past the edge of its domain.
fn inverse_clipped(z: f64, lambda: f64, clipped: &mut usize) -> f64 {
    match boxcox_inverse(z, lambda) {
        Ok(v) => v,
        Err(_) => {
            *clipped += 1;
            if lambda > 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        }
    }
}

pub fn build_bound(
    predicted: &[f64],
    state: &NormalizationState,
    level: f64,
) -> Result<ConfidenceBound, UncertaintyError> {
    let z = level_z(level)?;
    let half = z * state.delta_eps;
    let mut lower = Vec::with_capacity(predicted.len());
    let mut upper = Vec::with_capacity(predicted.len());
    let mut clipped_points = 0;
    for (index, &p) in predicted.iter().enumerate() {
        let zp = boxcox_forward(p, state.lambda)
            .map_err(|_| UncertaintyError::NonPositivePrediction { index, value: p })?;
        let centre = zp + state.mu_eps;
        lower.push(inverse_clipped(centre - half, state.lambda, &mut clipped_points));
        upper.push(inverse_clipped(centre + half, state.lambda, &mut clipped_points));
    }
    if clipped_points > 0 {
        debug!(clipped_points, level, "bound ends clipped at the transform domain edge");
    }
    Ok(ConfidenceBound {
        level,
        z,
        lower,
        upper,
        clipped_points,
    })
}

/// Signed distance of a measurement to the bound edge on its side of the
/// prediction; non-negative means inside.
pub fn dist_x(tau_m: f64, tau_p: f64, upper: f64, lower: f64) -> f64 {
    if tau_m >= tau_p {
        upper - tau_m
    } else {
        tau_m - lower
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandStatistics {
    pub n_in: f64,
    pub f_p: f64,
    pub f_n: f64,
    pub free: f64,
    pub n_points: usize,
    pub n_inside: usize,
}

pub fn band_statistics(
    measured: &[f64],
    predicted: &[f64],
    bound: &ConfidenceBound,
) -> Result<BandStatistics, UncertaintyError> {
    let n = measured.len();
    if n != predicted.len() || n != bound.lower.len() || n != bound.upper.len() {
        return Err(UncertaintyError::LengthMismatch {
            measured: n,
            predicted: predicted.len(),
            bound: bound.lower.len(),
        });
    }
    if n == 0 {
        return Err(UncertaintyError::Empty);
    }
    let mut n_inside = 0;
    let mut f_p = 0.0;
    let mut f_n = 0.0;
    for i in 0..n {
        let d = dist_x(measured[i], predicted[i], bound.upper[i], bound.lower[i]);
        if d >= 0.0 {
            n_inside += 1;
            f_p += d;
        } else {
            f_n -= d;
        }
    }
    Ok(BandStatistics {
        n_in: 100.0 * n_inside as f64 / n as f64,
        f_p,
        f_n,
        free: f_p + f_n,
        n_points: n,
        n_inside,
    })
}

/// Qualitative certainty from the share of measurements inside the bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certainty {
    High,
    Moderate,
    Unable,
}

pub fn classify_certainty(n_in: f64) -> Certainty {
    if n_in >= 80.0 {
        Certainty::High
    } else if n_in < 50.0 {
        Certainty::Unable
    } else {
        Certainty::Moderate
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OcbResult {
    /// Smallest level on the search grid with every point inside, or 100
    /// when no level below 100 achieves that.
    pub ocb: f64,
    pub z: f64,
    pub free_opt: f64,
    pub focb: f64,
    /// True when even the widest grid level leaves points outside.
    pub saturated: bool,
    /// Points outside at the reported level (0 unless saturated).
    pub outside_points: usize,
}

pub fn focb(ocb: f64, free_opt: f64) -> f64 {
    ocb * free_opt / 100.0
}

fn zeta_steps(zeta: f64) -> Result<usize, UncertaintyError> {
    if !(zeta > 0.0 && zeta < 100.0) {
        return Err(UncertaintyError::InvalidZeta(zeta));
    }
    let steps = (100.0 / zeta).round();
    if (steps * zeta - 100.0).abs() > 1e-9 * 100.0 || steps < 2.0 {
        return Err(UncertaintyError::InvalidZeta(zeta));
    }
    Ok(steps as usize)
}

/// Level of grid index `j` (`j * zeta`).
pub fn grid_level(j: usize, zeta: f64) -> f64 {
    j as f64 * zeta
}

/// Minimal bound level on the `zeta` grid that contains every measurement.
///
/// Binary search over the grid index; the inside count never decreases as
/// the level grows because the bound widens monotonically.
pub fn find_ocb(
    measured: &[f64],
    predicted: &[f64],
    state: &NormalizationState,
    zeta: f64,
) -> Result<OcbResult, UncertaintyError> {
    let steps = zeta_steps(zeta)?;
    let n = measured.len();
    if n == 0 {
        return Err(UncertaintyError::Empty);
    }
    let stats_at = |j: usize| -> Result<BandStatistics, UncertaintyError> {
        let bound = build_bound(predicted, state, grid_level(j, zeta))?;
        band_statistics(measured, predicted, &bound)
    };

    let last = steps - 1;
    let widest = stats_at(last)?;
    if widest.n_inside < n {
        let outside_points = n - widest.n_inside;
        debug!(
            outside_points,
            level = grid_level(last, zeta),
            "no bound level below 100 contains every point"
        );
        return Ok(OcbResult {
            ocb: 100.0,
            z: level_z(grid_level(last, zeta))?,
            free_opt: widest.f_p,
            focb: focb(100.0, widest.f_p),
            saturated: true,
            outside_points,
        });
    }

    let (mut lo, mut hi) = (1usize, last);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if stats_at(mid)?.n_inside == n {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let level = grid_level(lo, zeta);
    let at = stats_at(lo)?;
    Ok(OcbResult {
        ocb: level,
        z: level_z(level)?,
        free_opt: at.f_p,
        focb: focb(level, at.f_p),
        saturated: false,
        outside_points: 0,
    })
}
