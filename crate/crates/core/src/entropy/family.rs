//! Both the Tsallis and the Renyi profile reduce to one shape
//!
//!   tau / tau_max = expm1(ln_1p(expm1(k x) u) / k) / expm1(x)
//!
//! with `k` the model exponent and `x` a single shape parameter. `x = 0` is
//! the linear profile; `x > 0` bends it towards the end of the segment.

use crate::numerics::{find_root, SolverConfig};

const SERIES_CUTOFF: f64 = 1.0;
const LINEAR_CUTOFF: f64 = 1e-8;

/// `e^z - 1 - z`
pub(crate) fn phi(z: f64) -> f64 {
    if z.abs() < SERIES_CUTOFF {
        let mut term = 0.5 * z * z;
        let mut sum = term;
        let mut n = 2.0;
        while term.abs() > f64::EPSILON * sum.abs() {
            n += 1.0;
            term *= z / n;
            sum += term;
        }
        sum
    } else {
        z.exp_m1() - z
    }
}

/// `phi(z) / z`, continuous through 0.
pub(crate) fn psi(z: f64) -> f64 {
    if z.abs() < SERIES_CUTOFF {
        let mut term = 0.5 * z;
        let mut sum = term;
        let mut n = 2.0;
        while term.abs() > f64::EPSILON * sum.abs() {
            n += 1.0;
            term *= z / n;
            sum += term;
        }
        sum
    } else {
        phi(z) / z
    }
}

#[cfg(test)]
pub(crate) fn shape(k: f64, x: f64, u: f64) -> f64 {
    if x == 0.0 {
        return u;
    }
    (((k * x).exp_m1() * u).ln_1p() / k).exp_m1() / x.exp_m1()
}

/// Mean of [`shape`] over `u` in `[0, 1]`.
pub(crate) fn mean(k: f64, x: f64) -> f64 {
    if x.abs() < LINEAR_CUTOFF {
        return 0.5 + (k - 1.0) * x / 12.0;
    }
    let num = k * x * psi((k + 1.0) * x) - phi(k * x);
    num / ((k * x).exp_m1() * x.exp_m1())
}

/// `expm1(k x) / expm1(x)`, equal to `k` at `x = 0`.
pub(crate) fn exp_ratio(k: f64, x: f64) -> f64 {
    if x.abs() < LINEAR_CUTOFF {
        return k * (1.0 + 0.5 * (k - 1.0) * x);
    }
    (k * x).exp_m1() / x.exp_m1()
}

/// Refines a shape parameter so that `mean(k, x) = tau_hat` to root-finder
/// precision. Falls back to `x0` when no bracket is found nearby.
pub(crate) fn polish_shape(k: f64, tau_hat: f64, x0: f64, cfg: &SolverConfig) -> f64 {
    let f = |x: f64| mean(k, x) - tau_hat;
    if f(x0) == 0.0 {
        return x0;
    }
    let mut h = 1e-6 * x0.abs().max(1.0);
    for _ in 0..16 {
        let (a, b) = (x0 - h, x0 + h);
        if f(a) * f(b) <= 0.0 {
            return find_root(f, a, b, cfg).unwrap_or(x0);
        }
        h *= 4.0;
    }
    x0
}

/// Range of [`mean`] over all real `x`, as `(inf, sup)`.
pub(crate) fn mean_range(k: f64) -> (f64, f64) {
    if k > 0.0 {
        (k / (k + 1.0), 1.0 / (k + 1.0))
    } else {
        (0.0, 1.0)
    }
}
