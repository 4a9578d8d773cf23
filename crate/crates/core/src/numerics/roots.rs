use super::{NumericsError, SolverConfig};

/// Finds a root of `f` inside the bracket `[a, b]`.
///
/// Secant steps are taken from the bracket endpoints and replaced by a
/// bisection whenever they land outside the bracket or the previous step
/// failed to halve it, so convergence is never slower than plain bisection.
/// The bracket orientation does not matter.
pub fn find_root<F>(f: F, a: f64, b: f64, cfg: &SolverConfig) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if !(flo.is_finite() && fhi.is_finite()) || flo.signum() == fhi.signum() {
        return Err(NumericsError::NoSignChange {
            a: lo,
            b: hi,
            fa: flo,
            fb: fhi,
        });
    }

    let mut prev_width = f64::INFINITY;
    for _ in 0..cfg.max_iter {
        let width = hi - lo;
        if width <= cfg.tol_root * (1.0 + lo.abs().max(hi.abs())) {
            return Ok(if flo.abs() <= fhi.abs() { lo } else { hi });
        }
        let mid = lo + 0.5 * width;
        let mut x = if width > 0.5 * prev_width {
            mid
        } else {
            hi - fhi * (hi - lo) / (fhi - flo)
        };
        if !(x > lo && x < hi) {
            x = mid;
        }
        prev_width = width;

        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if !fx.is_finite() {
            // Fall back to the midpoint; the bracket invariant still holds.
            let fm = f(mid);
            if fm == 0.0 {
                return Ok(mid);
            }
            if fm.signum() == flo.signum() {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
                fhi = fm;
            }
            continue;
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
    }

    Err(NumericsError::NotConverged {
        iterations: cfg.max_iter,
        best_residual: flo.abs().min(fhi.abs()),
        best_point: [lo, hi],
    })
}
