//! Sign-change bracketing on a uniform grid plus bisection refinement.

/// Bisect `f` on `[lo, hi]`, which must bracket a sign change, until the
/// interval cannot be split further in floating point.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    if f(hi) == 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    // closest endpoint
    if f(lo).abs() <= f(hi).abs() {
        lo
    } else {
        hi
    }
}

/// All sign changes of `f` on `steps` uniform cells of `[lo, hi]`, each
/// refined by bisection. NaN samples break brackets. Roots are returned in
/// increasing order.
pub fn bracket_roots<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    let steps = steps.max(1);
    let at = |i: usize| lo + (hi - lo) * (i as f64) / (steps as f64);
    let mut roots = Vec::new();
    let mut x_prev = at(0);
    let mut f_prev = f(x_prev);
    if f_prev == 0.0 {
        roots.push(x_prev);
    }
    for i in 1..=steps {
        let x = at(i);
        let fx = f(x);
        if fx == 0.0 {
            roots.push(x);
        } else if f_prev != 0.0
            && f_prev.is_finite()
            && fx.is_finite()
            && (fx > 0.0) != (f_prev > 0.0)
        {
            roots.push(bisect(&f, x_prev, x));
        }
        x_prev = x;
        f_prev = fx;
    }
    roots
}
