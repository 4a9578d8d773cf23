use super::{NumericsError, SolverConfig};

/// Axis-aligned box scanned for Newton seeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedBox {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Solution2d {
    pub point: [f64; 2],
    /// Max-norm of the residual at `point`.
    pub residual: f64,
    pub iterations: usize,
}

/// Number of grid seeds tried before giving up.
const SEEDS_TRIED: usize = 6;
/// Extra Newton steps taken once the tolerance is met, kept only while they
/// still reduce the residual.
const POLISH_STEPS: usize = 2;

fn max_norm(r: [f64; 2]) -> f64 {
    if r[0].is_finite() && r[1].is_finite() {
        r[0].abs().max(r[1].abs())
    } else {
        f64::INFINITY
    }
}

fn sum_sq(r: [f64; 2]) -> f64 {
    if r[0].is_finite() && r[1].is_finite() {
        r[0] * r[0] + r[1] * r[1]
    } else {
        f64::INFINITY
    }
}

/// Solves `F(p) = 0` for a 2-vector function.
///
/// The seed box is scanned on a `grid_points x grid_points` grid; damped
/// Newton iterations (central-difference Jacobian, step halving on the
/// squared residual) are started from the best few grid points in turn.
/// `F` is expected to return residuals already scaled to be dimensionless.
pub fn solve_2d<F>(f: F, seed_box: SeedBox, cfg: &SolverConfig) -> Result<Solution2d, NumericsError>
where
    F: Fn([f64; 2]) -> [f64; 2],
{
    cfg.validate()?;
    let n = cfg.grid_points;
    let mut seeds: Vec<(f64, [f64; 2])> = Vec::with_capacity(n * n);
    for i in 0..n {
        let x = seed_box.x.0 + (seed_box.x.1 - seed_box.x.0) * (i as f64 + 0.5) / n as f64;
        for j in 0..n {
            let y = seed_box.y.0 + (seed_box.y.1 - seed_box.y.0) * (j as f64 + 0.5) / n as f64;
            let r = max_norm(f([x, y]));
            if r.is_finite() {
                seeds.push((r, [x, y]));
            }
        }
    }
    seeds.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut best = (f64::INFINITY, [f64::NAN; 2]);
    let mut total_iter = 0;
    for &(_, seed) in seeds.iter().take(SEEDS_TRIED) {
        let (point, residual, iters) = newton(&f, seed, cfg);
        total_iter += iters;
        if residual < cfg.tol_residual {
            return Ok(Solution2d {
                point,
                residual,
                iterations: iters,
            });
        }
        if residual < best.0 {
            best = (residual, point);
        }
    }

    Err(NumericsError::NotConverged {
        iterations: total_iter,
        best_residual: best.0,
        best_point: best.1,
    })
}

fn newton<F>(f: &F, start: [f64; 2], cfg: &SolverConfig) -> ([f64; 2], f64, usize)
where
    F: Fn([f64; 2]) -> [f64; 2],
{
    let mut p = start;
    let mut r = f(p);
    let mut polished = 0;
    for iter in 0..cfg.max_iter {
        let norm = max_norm(r);
        if norm < cfg.tol_residual {
            if polished == POLISH_STEPS || norm == 0.0 {
                return (p, norm, iter);
            }
            polished += 1;
        }

        let mut jac = [[0.0; 2]; 2];
        for k in 0..2 {
            let h = 1e-6 * p[k].abs().max(1.0);
            let mut plus = p;
            let mut minus = p;
            plus[k] += h;
            minus[k] -= h;
            let fp = f(plus);
            let fm = f(minus);
            jac[0][k] = (fp[0] - fm[0]) / (2.0 * h);
            jac[1][k] = (fp[1] - fm[1]) / (2.0 * h);
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            return (p, norm, iter);
        }
        let step = [
            -(jac[1][1] * r[0] - jac[0][1] * r[1]) / det,
            -(-jac[1][0] * r[0] + jac[0][0] * r[1]) / det,
        ];

        let current = sum_sq(r);
        let mut damping = 1.0;
        loop {
            let trial = [p[0] + damping * step[0], p[1] + damping * step[1]];
            let rt = f(trial);
            if sum_sq(rt) < current {
                p = trial;
                r = rt;
                break;
            }
            damping *= 0.5;
            if damping < 1e-12 {
                return (p, norm, iter);
            }
        }
    }
    (p, max_norm(r), cfg.max_iter)
}
