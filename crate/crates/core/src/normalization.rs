//! Box-Cox transform, transfer-factor fitting and Gaussian error moments of
//! measured versus predicted stresses.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const LAMBDA_MIN: f64 = -3.0;
pub const LAMBDA_MAX: f64 = 3.0;
pub const LAMBDA_GRID_STEP: f64 = 0.01;
pub const MIN_FIT_POINTS: usize = 8;

const GOLDEN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NormalizationError {
    #[error("value {value} at index {index} must be strictly positive")]
    NonPositive { index: usize, value: f64 },
    #[error("length mismatch: {measured} measured vs {predicted} predicted values")]
    LengthMismatch { measured: usize, predicted: usize },
    #[error("need at least {min} values, got {n}")]
    TooFewPoints { n: usize, min: usize },
    #[error("degenerate data: the likelihood has no finite maximum (constant values?)")]
    Degenerate,
    #[error("inverse transform undefined: lambda * z + 1 = {} <= 0 (z = {z}, lambda = {lambda})", lambda * z + 1.0)]
    InverseUndefined { z: f64, lambda: f64 },
    #[error("lambda = {0} must be finite")]
    InvalidLambda(f64),
}

/// How the transfer factor is fitted from paired data.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaFit {
    /// Maximise the normal likelihood of `Z(tau_m) - Z(tau_p)`.
    #[default]
    Residual,
    /// Maximise the normal likelihood of `Z(tau_m)` alone.
    MeasuredMarginal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalizationState {
    pub lambda: f64,
    pub mu_eps: f64,
    pub delta_eps: f64,
    pub n_points: usize,
}

pub fn boxcox_forward(x: f64, lambda: f64) -> Result<f64, NormalizationError> {
    if !(x > 0.0) {
        return Err(NormalizationError::NonPositive { index: 0, value: x });
    }
    Ok(forward_unchecked(x, lambda))
}

fn forward_unchecked(x: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        x.ln()
    } else if lambda == 1.0 {
        x - 1.0
    } else {
        (lambda * x.ln()).exp_m1() / lambda
    }
}

pub fn boxcox_inverse(z: f64, lambda: f64) -> Result<f64, NormalizationError> {
    if lambda == 0.0 {
        return Ok(z.exp());
    }
    let t = lambda * z;
    if !(t > -1.0) {
        return Err(NormalizationError::InverseUndefined { z, lambda });
    }
    if lambda == 1.0 {
        return Ok(z + 1.0);
    }
    Ok((t.ln_1p() / lambda).exp())
}

fn check_positive(values: &[f64]) -> Result<(), NormalizationError> {
    match values.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
        Some(index) => Err(NormalizationError::NonPositive {
            index,
            value: values[index],
        }),
        None => Ok(()),
    }
}

/// Mean and population variance in two passes.
fn mean_var(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var)
}

/// Transform written in terms of `ln x`.
fn forward_from_ln(ln_x: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        ln_x
    } else if lambda == 1.0 {
        ln_x.exp() - 1.0
    } else {
        (lambda * ln_x).exp_m1() / lambda
    }
}

/// Grid scan over `[LAMBDA_MIN, LAMBDA_MAX]` followed by golden-section
/// refinement around the best grid point.
fn maximize<F: Fn(f64) -> f64>(loglik: F) -> Result<f64, NormalizationError> {
    let steps = ((LAMBDA_MAX - LAMBDA_MIN) / LAMBDA_GRID_STEP).round() as usize;
    let at = |i: usize| LAMBDA_MIN + i as f64 * LAMBDA_GRID_STEP;
    let mut best: Option<(usize, f64)> = None;
    for i in 0..=steps {
        let v = loglik(at(i));
        if v.is_finite() && best.map_or(true, |(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    let (i, _) = best.ok_or(NormalizationError::Degenerate)?;

    let mut a = at(i.saturating_sub(1));
    let mut b = at((i + 1).min(steps));
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = loglik(c);
    let mut fd = loglik(d);
    while b - a > GOLDEN_TOL {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = loglik(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = loglik(d);
        }
    }
    let refined = 0.5 * (a + b);
    // Keep the grid point if refinement wandered onto a worse value.
    if loglik(refined) >= loglik(at(i)) {
        Ok(refined)
    } else {
        Ok(at(i))
    }
}

/// Box-Cox profile log-likelihood of normality for `values`.
pub fn profile_loglik(values: &[f64], lambda: f64) -> f64 {
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    profile_loglik_ln(&logs, logs.iter().sum(), lambda)
}

fn profile_loglik_ln(logs: &[f64], sum_ln: f64, lambda: f64) -> f64 {
    let n = logs.len() as f64;
    let z: Vec<f64> = logs.iter().map(|&l| forward_from_ln(l, lambda)).collect();
    let (_, var) = mean_var(&z);
    -0.5 * n * var.ln() + (lambda - 1.0) * sum_ln
}

/// Profile log-likelihood of the transformed residuals `Z(m) - Z(p)`, with
/// the Jacobian of the measured values.
pub fn residual_loglik(measured: &[f64], predicted: &[f64], lambda: f64) -> f64 {
    let lm: Vec<f64> = measured.iter().map(|v| v.ln()).collect();
    let lp: Vec<f64> = predicted.iter().map(|v| v.ln()).collect();
    residual_loglik_ln(&lm, &lp, lm.iter().sum(), lambda)
}

fn residual_loglik_ln(lm: &[f64], lp: &[f64], sum_ln: f64, lambda: f64) -> f64 {
    let n = lm.len() as f64;
    let eps: Vec<f64> = lm
        .iter()
        .zip(lp)
        .map(|(&m, &p)| forward_from_ln(m, lambda) - forward_from_ln(p, lambda))
        .collect();
    let (_, var) = mean_var(&eps);
    -0.5 * n * var.ln() + (lambda - 1.0) * sum_ln
}

/// Transfer factor maximising the profile likelihood of `values`.
pub fn fit_lambda(values: &[f64]) -> Result<f64, NormalizationError> {
    if values.len() < MIN_FIT_POINTS {
        return Err(NormalizationError::TooFewPoints {
            n: values.len(),
            min: MIN_FIT_POINTS,
        });
    }
    check_positive(values)?;
    if values.iter().all(|&v| v == values[0]) {
        return Err(NormalizationError::Degenerate);
    }
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let sum_ln = logs.iter().sum();
    maximize(|l| profile_loglik_ln(&logs, sum_ln, l))
}

/// Transfer factor maximising the likelihood of the transformed residuals.
pub fn fit_lambda_residual(measured: &[f64], predicted: &[f64]) -> Result<f64, NormalizationError> {
    check_lengths(measured, predicted)?;
    if measured.len() < MIN_FIT_POINTS {
        return Err(NormalizationError::TooFewPoints {
            n: measured.len(),
            min: MIN_FIT_POINTS,
        });
    }
    check_positive(measured)?;
    check_positive(predicted)?;
    let first = measured[0] / predicted[0];
    if measured.iter().zip(predicted).all(|(m, p)| m / p == first) {
        return Err(NormalizationError::Degenerate);
    }
    let lm: Vec<f64> = measured.iter().map(|v| v.ln()).collect();
    let lp: Vec<f64> = predicted.iter().map(|v| v.ln()).collect();
    let sum_ln = lm.iter().sum();
    maximize(|l| residual_loglik_ln(&lm, &lp, sum_ln, l))
}

pub fn fit(method: LambdaFit, measured: &[f64], predicted: &[f64]) -> Result<f64, NormalizationError> {
    match method {
        LambdaFit::Residual => fit_lambda_residual(measured, predicted),
        LambdaFit::MeasuredMarginal => fit_lambda(measured),
    }
}

fn check_lengths(measured: &[f64], predicted: &[f64]) -> Result<(), NormalizationError> {
    if measured.len() != predicted.len() {
        return Err(NormalizationError::LengthMismatch {
            measured: measured.len(),
            predicted: predicted.len(),
        });
    }
    Ok(())
}

/// Mean and sample standard deviation (n - 1) of `Z(m) - Z(p)`.
pub fn error_stats(
    measured: &[f64],
    predicted: &[f64],
    lambda: f64,
) -> Result<NormalizationState, NormalizationError> {
    check_lengths(measured, predicted)?;
    if measured.len() < 2 {
        return Err(NormalizationError::TooFewPoints {
            n: measured.len(),
            min: 2,
        });
    }
    if !lambda.is_finite() {
        return Err(NormalizationError::InvalidLambda(lambda));
    }
    check_positive(measured)?;
    check_positive(predicted)?;
    let eps: Vec<f64> = measured
        .iter()
        .zip(predicted)
        .map(|(&m, &p)| forward_unchecked(m, lambda) - forward_unchecked(p, lambda))
        .collect();
    let n = eps.len() as f64;
    let mu = eps.iter().sum::<f64>() / n;
    let ss = eps.iter().map(|e| (e - mu) * (e - mu)).sum::<f64>();
    Ok(NormalizationState {
        lambda,
        mu_eps: mu,
        delta_eps: (ss / (n - 1.0)).sqrt(),
        n_points: eps.len(),
    })
}

/// Keeps only pairs where both stresses are strictly positive. Returns the
/// kept values and the number of dropped pairs.
pub fn positive_pairs(measured: &[f64], predicted: &[f64]) -> (Vec<f64>, Vec<f64>, usize) {
    let mut m = Vec::with_capacity(measured.len());
    let mut p = Vec::with_capacity(predicted.len());
    for (&a, &b) in measured.iter().zip(predicted) {
        if a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite() {
            m.push(a);
            p.push(b);
        }
    }
    let dropped = measured.len().max(predicted.len()) - m.len();
    (m, p, dropped)
}
