//! Quadrature utilities: adaptive Simpson with error control, composite
//! Simpson/trapezoid on tabulated grids, and a Filon rule for sine
//! transforms `int f(t) sin(x t) dt` whose accuracy does not degrade as the
//! oscillation rate `x` grows.

use crate::{Error, Result};

fn simpson_half(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = a + (b - a) / 2.0;
    let fm = f(m);
    (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
}

#[allow(clippy::too_many_arguments)]
fn simpson_recurse(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    fa: f64,
    m: f64,
    fm: f64,
    b: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let (ml, fml, left) = simpson_half(f, a, fa, m, fm);
    let (mr, fmr, right) = simpson_half(f, m, fm, b, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::QuadratureFailed {
            a,
            b,
            estimate: left + right,
            error: delta.abs() / 15.0,
            tol,
        });
    }
    Ok(simpson_recurse(f, a, fa, ml, fml, m, fm, left, tol / 2.0, depth - 1)?
        + simpson_recurse(f, m, fm, mr, fmr, b, fb, right, tol / 2.0, depth - 1)?)
}

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance
/// `tol`. Errors (with the offending interval) instead of returning a value
/// that failed to converge.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson_half(f, a, fa, b, fb);
    simpson_recurse(f, a, fa, m, fm, b, fb, whole, tol, 48)
}

/// Composite trapezoid on a uniform grid of `values` with spacing `h`.
pub fn trapezoid_uniform(values: &[f64], h: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let inner: f64 = values[1..values.len() - 1].iter().sum();
    h * (0.5 * (values[0] + values[values.len() - 1]) + inner)
}

/// Composite Simpson on a uniform grid with an odd number of points.
pub fn simpson_uniform(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    assert!(n >= 3 && n % 2 == 1, "simpson needs an odd point count >= 3");
    let mut acc = values[0] + values[n - 1];
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * h / 3.0
}

/// Filon–Simpson weights for the sine transform at panel phase `theta`.
fn filon_weights(theta: f64) -> (f64, f64, f64) {
    if theta.abs() < 1.0 / 6.0 {
        let t2 = theta * theta;
        let alpha = theta * t2 * (2.0 / 45.0 + t2 * (-2.0 / 315.0 + t2 * (2.0 / 4725.0)));
        let beta = 2.0 / 3.0 + t2 * (2.0 / 15.0 + t2 * (-4.0 / 105.0 + t2 * (2.0 / 567.0)));
        let gamma = 4.0 / 3.0 + t2 * (-2.0 / 15.0 + t2 * (1.0 / 210.0 + t2 * (-1.0 / 11340.0)));
        (alpha, beta, gamma)
    } else {
        let (s, c) = theta.sin_cos();
        let t3 = theta * theta * theta;
        let alpha = (theta * theta + theta * s * c - 2.0 * s * s) / t3;
        let beta = 2.0 * (theta * (1.0 + c * c) - 2.0 * s * c) / t3;
        let gamma = 4.0 * (s - theta * c) / t3;
        (alpha, beta, gamma)
    }
}

/// Filon–Simpson evaluation of `int_a^b f(t) sin(x t) dt` from samples of
/// `f` at `2m + 1` equispaced points (spacing `h`, so `b = a + 2 m h`). The
/// trigonometric factor is integrated exactly against a piecewise parabola,
/// so the rule stays accurate for arbitrarily large `x`.
pub fn filon_sin(samples: &[f64], a: f64, h: f64, x: f64) -> f64 {
    let n = samples.len();
    assert!(n >= 3 && n % 2 == 1, "filon needs an odd sample count >= 3");
    let b = a + (n - 1) as f64 * h;
    let theta = x * h;
    let (alpha, beta, gamma) = filon_weights(theta);
    let mut s_even = 0.0;
    let mut s_odd = 0.0;
    for (i, &fi) in samples.iter().enumerate() {
        let t = a + i as f64 * h;
        let s = (x * t).sin();
        if i % 2 == 0 {
            s_even += fi * s;
        } else {
            s_odd += fi * s;
        }
    }
    s_even -= 0.5 * (samples[0] * (x * a).sin() + samples[n - 1] * (x * b).sin());
    h * (alpha * (samples[0] * (x * a).cos() - samples[n - 1] * (x * b).cos())
        + beta * s_even
        + gamma * s_odd)
}
