use serde::Serialize;

use crate::numerics::{solve_2d, SeedBox, SolverConfig};

use super::{family, EntropyError, ModelId, StressTargets};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TsallisParams {
    pub lambda1: f64,
    pub lambda2: f64,
    pub k: f64,
    pub q: f64,
}

/// `k = (q - 1) / q`; only `q > 1` gives `k` in `(0, 1)`.
pub fn tsallis_k(q: f64) -> Result<f64, EntropyError> {
    if q.is_finite() && q > 1.0 {
        Ok((q - 1.0) / q)
    } else {
        Err(EntropyError::InvalidParameter {
            name: "q",
            value: q,
            reason: "must be finite and greater than 1",
        })
    }
}

/// Open interval of `tau_mean / tau_max` the profile can reach for this `q`.
pub fn tsallis_tau_hat_range(q: f64) -> Result<(f64, f64), EntropyError> {
    Ok(family::mean_range(tsallis_k(q)?))
}

/// Solves the two Tsallis constraints for `(lambda1, lambda2)`.
///
/// Internally the unknowns are the shape parameter `x = ln(S / lambda2)`,
/// with `S = lambda2 + lambda1 tau_max`, and `v = ln(lambda2)`. Both
/// constraints stay regular at the linear profile `lambda1 = 0`.
pub fn solve_tsallis(
    targets: &StressTargets,
    q: f64,
    cfg: &SolverConfig,
) -> Result<TsallisParams, EntropyError> {
    let k = tsallis_k(q)?;
    let tau_hat = targets.tau_hat();
    let (lo, hi) = family::mean_range(k);
    if !(tau_hat > lo && tau_hat < hi) {
        return Err(EntropyError::Unrepresentable {
            model: ModelId::Tsallis,
            tau_hat,
            lo,
            hi,
        });
    }

    let ln_tau_max = targets.tau_max.ln();
    let k_ln_k = k * k.ln();
    let v_of = |x: f64| (ln_tau_max + family::exp_ratio(k, x).ln() - k_ln_k) / (1.0 - k);
    let residual = |p: [f64; 2]| {
        let [x, v] = p;
        [
            family::mean(k, x) - tau_hat,
            (k - 1.0) * v + ln_tau_max + family::exp_ratio(k, x).ln() - k_ln_k,
        ]
    };
    let vc = v_of(0.0);
    let sol = solve_2d(
        residual,
        SeedBox {
            x: (-40.0, 40.0),
            y: (vc - 45.0, vc + 45.0),
        },
        cfg,
    )?;

    // The second constraint is linear in v, so both can be tightened exactly.
    let x = family::polish_shape(k, tau_hat, sol.point[0], cfg);
    let lambda2 = v_of(x).exp();
    let lambda1 = x.exp_m1() * lambda2 / targets.tau_max;
    Ok(TsallisParams {
        lambda1,
        lambda2,
        k,
        q,
    })
}

/// Tsallis profile at segment coordinate `u`.
pub fn tsallis_profile(p: &TsallisParams, u: f64) -> Result<f64, EntropyError> {
    let c = (p.lambda2 / p.k).powf(p.k);
    if p.lambda1 == 0.0 {
        return Ok(p.lambda2 * u / (c * p.k));
    }
    let inner = p.lambda1 * u / c;
    if !(inner > -1.0) {
        return Err(EntropyError::ProfileDomain {
            model: ModelId::Tsallis,
            u,
        });
    }
    Ok(p.lambda2 / p.lambda1 * (inner.ln_1p() / p.k).exp_m1())
}

/// Scaled residuals of the two constraints for solved parameters.
///
/// The first is `S^k - lambda2^k - lambda1 k^k`; the second is the mean
/// constraint `k[S^{k+1} - lambda2^{k+1}] - (k+1) lambda2 (S^k - lambda2^k)
/// - (k+1) lambda1^2 k^k tau_mean`. Each is divided by the magnitude of its
/// largest term, with differences of powers evaluated without cancellation.
pub fn tsallis_residuals(p: &TsallisParams, targets: &StressTargets) -> [f64; 2] {
    let k = p.k;
    let l2 = p.lambda2;
    let log_ratio = (p.lambda1 * targets.tau_max / l2).ln_1p();
    let kk = k.powf(k);

    let diff_k = l2.powf(k) * (k * log_ratio).exp_m1();
    let lin = p.lambda1 * kk;
    let r13 = scaled(diff_k - lin, &[diff_k, lin]);

    let t1 = k * l2.powf(k + 1.0) * ((k + 1.0) * log_ratio).exp_m1();
    let t2 = (k + 1.0) * l2 * diff_k;
    let t3 = (k + 1.0) * p.lambda1 * p.lambda1 * kk * targets.tau_mean;
    let r14 = scaled(t1 - t2 - t3, &[t1, t2, t3]);
    [r13, r14]
}

pub(crate) fn scaled(value: f64, terms: &[f64]) -> f64 {
    let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    if scale == 0.0 {
        value.abs()
    } else {
        value / scale
    }
}
