use serde::Serialize;

use crate::numerics::{solve_2d, SeedBox, SolverConfig};

use super::tsallis::scaled;
use super::{family, EntropyError, ModelId};

/// Renyi multipliers. `lambda_p` is λ', `lambda_pp` is λ''; both are
/// dimensionless because the profile is written relative to `tau_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RenyiParams {
    pub lambda_p: f64,
    pub lambda_pp: f64,
    pub k_prime: f64,
    pub alpha_prime: f64,
}

/// `k' = alpha' / (alpha' - 1)` for `alpha'` in `(0, 1)`.
pub fn renyi_k(alpha_prime: f64) -> Result<f64, EntropyError> {
    if alpha_prime > 0.0 && alpha_prime < 1.0 {
        Ok(alpha_prime / (alpha_prime - 1.0))
    } else {
        Err(EntropyError::InvalidParameter {
            name: "alpha_prime",
            value: alpha_prime,
            reason: "must lie in (0, 1)",
        })
    }
}

/// `alpha'^{k'} / (1 - alpha')`
fn rhs(alpha_prime: f64, k_prime: f64) -> f64 {
    alpha_prime.powf(k_prime) / (1.0 - alpha_prime)
}

/// Solves the two Renyi constraints for `(lambda', lambda'')`.
///
/// With `a = -lambda''` and `b = a - lambda'`, the unknowns are the shape
/// parameter `x = ln(b / a)` and `w = ln(a)`.
pub fn solve_renyi(
    tau_hat: f64,
    alpha_prime: f64,
    cfg: &SolverConfig,
) -> Result<RenyiParams, EntropyError> {
    let k = renyi_k(alpha_prime)?;
    if !(tau_hat > 0.0 && tau_hat < 1.0) {
        return Err(EntropyError::Unrepresentable {
            model: ModelId::Renyi,
            tau_hat,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let ln_rhs = rhs(alpha_prime, k).ln();
    let w_of = |x: f64| (ln_rhs - (-family::exp_ratio(k, x)).ln()) / (k - 1.0);
    let residual = |p: [f64; 2]| {
        let [x, w] = p;
        [
            family::mean(k, x) - tau_hat,
            (k - 1.0) * w + (-family::exp_ratio(k, x)).ln() - ln_rhs,
        ]
    };
    let wc = w_of(0.0);
    let sol = solve_2d(
        residual,
        SeedBox {
            x: (-40.0, 40.0),
            y: (wc - 45.0, wc + 45.0),
        },
        cfg,
    )?;

    let x = family::polish_shape(k, tau_hat, sol.point[0], cfg);
    let a = w_of(x).exp();
    Ok(RenyiParams {
        lambda_p: -a * x.exp_m1(),
        lambda_pp: -a,
        k_prime: k,
        alpha_prime,
    })
}

/// Renyi profile at segment coordinate `u`.
pub fn renyi_profile(p: &RenyiParams, tau_max: f64, u: f64) -> Result<f64, EntropyError> {
    let a = -p.lambda_pp;
    let k = p.k_prime;
    let coef = p.alpha_prime.powf(k) / (p.alpha_prime - 1.0);
    if p.lambda_p == 0.0 {
        return Ok(tau_max * a.powf(1.0 - k) * coef * u / k);
    }
    let inner = -p.lambda_p * coef * u / a.powf(k);
    if !(a > 0.0 && inner > -1.0) {
        return Err(EntropyError::ProfileDomain {
            model: ModelId::Renyi,
            u,
        });
    }
    Ok(-tau_max * a * (inner.ln_1p() / k).exp_m1() / p.lambda_p)
}

/// Scaled residuals of the two constraints, each multiplied through by its
/// power of `lambda'` and divided by the magnitude of its largest term.
pub fn renyi_residuals(p: &RenyiParams, tau_hat: f64) -> [f64; 2] {
    let a = -p.lambda_pp;
    let k = p.k_prime;
    let al = p.alpha_prime;
    let log_ratio = (-p.lambda_p / a).ln_1p();

    let diff_k = a.powf(k) * (k * log_ratio).exp_m1();
    let lin = p.lambda_p * rhs(al, k);
    let r16 = scaled(diff_k - lin, &[diff_k, lin]);

    let c = k + 1.0;
    let d = if c == 0.0 {
        log_ratio
    } else {
        a.powf(c) * (c * log_ratio).exp_m1() / c
    };
    let b_k = a.powf(k) * (k * log_ratio).exp();
    let t1 = -p.lambda_p * b_k;
    let t3 = p.lambda_p * p.lambda_p * al.powf(k) * tau_hat / (al - 1.0);
    let r17 = scaled(t1 - d - t3, &[t1, d, t3]);
    [r16, r17]
}
