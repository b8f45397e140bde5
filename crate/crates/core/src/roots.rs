//! Scalar root bracketing and maximization used by the threshold solvers.

/// Bisects `f` on `[lo, hi]` where `pos(f(lo))` holds and `pos(f(hi))` does not,
/// until the bracket is narrower than `tol`. Returns the final bracket.
pub(crate) fn bisect_boundary<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> bool,
{
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Golden-section maximization of a unimodal `f` on `[a, b]`.
/// Returns `(argmax, max)`.
pub(crate) fn golden_max<F>(f: F, mut a: f64, mut b: f64, iterations: usize) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iterations {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_sqrt2() {
        let (lo, hi) = bisect_boundary(|x| x * x < 2.0, 0.0, 2.0, 1e-12);
        assert!(lo <= 2f64.sqrt() && hi >= 2f64.sqrt() && hi - lo <= 1e-12);
    }

    #[test]
    fn golden_parabola() {
        let (x, fx) = golden_max(|x| -(x - 0.3) * (x - 0.3) + 1.0, 0.0, 1.0, 80);
        assert!((x - 0.3).abs() < 1e-8 && (fx - 1.0).abs() < 1e-12);
    }
}
