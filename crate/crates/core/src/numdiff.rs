//! Finite-difference derivatives used as independent oracles.

/// Five-point central difference `f'(x)` with step `h`.
pub fn central5<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// Five-point central difference of a phase-valued function; neighbouring
/// samples are unwrapped against `f(x)` so a `2 pi` branch cut inside the
/// stencil does not matter.
pub fn central5_phase<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let center = f(x);
    let unwrap = |v: f64| center + crate::scattering::reduce_phase(v - center);
    let s = |dx: f64| unwrap(f(x + dx));
    (s(-2.0 * h) - 8.0 * s(-h) + 8.0 * s(h) - s(2.0 * h)) / (12.0 * h)
}

/// Two-point central difference refined by one Richardson step
/// (`(4 D(h/2) - D(h)) / 3`).
pub fn richardson_central<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let d = |step: f64| (f(x + step) - f(x - step)) / (2.0 * step);
    (4.0 * d(0.5 * h) - d(h)) / 3.0
}

/// `|a - b| / |b|`, or `|a - b|` when `b` is exactly zero.
pub fn relative_error(a: f64, b: f64) -> f64 {
    let diff = (a - b).abs();
    if b == 0.0 {
        diff
    } else {
        diff / b.abs()
    }
}
