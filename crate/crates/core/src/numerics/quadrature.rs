pub const DEFAULT_PANELS: usize = 1024;

/// Mean value of `f` over `[a, b]` by composite Simpson's rule.
///
/// An odd panel count is bumped to the next even number.
pub fn quadrature_mean<F>(f: F, a: f64, b: f64, n_panels: usize) -> f64
where
    F: Fn(f64) -> f64,
{
    let n = n_panels.max(2);
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let x = a + h * i as f64;
        sum += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    sum * h / 3.0 / (b - a)
}
