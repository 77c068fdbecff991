//! Minimax rate formulas for location, variance, and total-variation
//! estimation, plus the Huber-model comparators and the two-Gaussian
//! total-variation surrogate.
//!
//! The piecewise formulas are implemented literally. They are sharp only up
//! to universal constants, so callers comparing against them must use ratio
//! tolerances; constant-factor jumps at the regime boundaries are expected
//! (the printed second/third-regime constants differ by ~16 at k = n/4).

use serde::{Deserialize, Serialize};

use crate::{Error, NullParams, Result};

fn check_identifiable(k: usize, n: usize) -> Result<()> {
    if n < 2 || 2 * k >= n {
        return Err(Error::KNotIdentifiable { k, n });
    }
    Ok(())
}

/// Squared minimax rate for location. Four regimes with boundaries at
/// k = sqrt(n), n/4, and n/2 - sqrt(n); membership uses <= on the left
/// edge. The last regime's logarithm is floored at 1 to keep the rate
/// positive through the junction.
pub fn rate_location_sq(k: usize, n: usize, sigma2: f64) -> Result<f64> {
    check_identifiable(k, n)?;
    if k == 0 || sigma2 <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "rate_location_sq needs k >= 1 and sigma2 > 0, got k = {k}, sigma2 = {sigma2}"
        )));
    }
    let (kf, nf) = (k as f64, n as f64);
    let sqrt_n = nf.sqrt();
    let value = if kf <= sqrt_n {
        sigma2 / nf
    } else if kf <= nf / 4.0 {
        sigma2 * kf * kf / (nf * nf) / (std::f64::consts::E * kf * kf / nf).ln()
    } else if kf <= nf / 2.0 - sqrt_n {
        let gap = nf - 2.0 * kf;
        sigma2 / (std::f64::consts::E * gap * gap / nf).ln()
    } else {
        let gap = nf - 2.0 * kf;
        sigma2 * (std::f64::consts::E * nf / (gap * gap)).ln().max(1.0)
    };
    Ok(value)
}

/// Squared minimax rate for the relative variance error; boundary at
/// k = sqrt(n).
pub fn rate_variance(k: usize, n: usize) -> Result<f64> {
    check_identifiable(k, n)?;
    if k == 0 {
        return Err(Error::InvalidParameter("rate_variance needs k >= 1".into()));
    }
    let (kf, nf) = (k as f64, n as f64);
    let value = if kf <= nf.sqrt() {
        1.0 / nf
    } else {
        let log = (1.0 + kf / nf.sqrt()).ln();
        kf * kf / (nf * nf) / (log * log)
    };
    Ok(value)
}

/// Minimax rate for estimating the null in total variation:
/// `1 ^ k / (n sqrt(log(1 + k^2 (n-2k)^2 / n^3)))`.
pub fn rate_tv(k: usize, n: usize) -> Result<f64> {
    check_identifiable(k, n)?;
    if k == 0 {
        return Err(Error::InvalidParameter("rate_tv needs k >= 1".into()));
    }
    Ok(eps_location(k, n).min(1.0))
}

/// The location interval rate `eps(k, n) = k / (n sqrt(log(1 + k^2 (n-2k)^2 / n^3)))`
/// driving the Lepski interval widths. Reduces to ~1/sqrt(n) for k <= sqrt(n).
pub fn eps_location(k: usize, n: usize) -> f64 {
    let (kf, nf) = (k as f64, n as f64);
    let gap = nf - 2.0 * kf;
    let u = kf * kf * gap * gap / (nf * nf * nf);
    kf / (nf * u.ln_1p().sqrt())
}

/// The variance interval rate `eps_var(k, n) = k / (n log(1 + k/sqrt(n)))`.
pub fn eps_variance(k: usize, n: usize) -> f64 {
    let (kf, nf) = (k as f64, n as f64);
    kf / (nf * (kf / nf.sqrt()).ln_1p())
}

/// Minimax squared location rate in Huber's contamination model:
/// parametric-plus-bias below n/5, blowing up logarithmically above.
pub fn huber_rate(k: usize, n: usize) -> Result<f64> {
    check_identifiable(k, n)?;
    let (kf, nf) = (k as f64, n as f64);
    let value = if kf <= nf / 5.0 {
        1.0 / nf + kf * kf / (nf * nf)
    } else {
        (std::f64::consts::E * nf / (nf - 2.0 * kf)).ln()
    };
    Ok(value)
}

/// Lower bound on the modulus of continuity in Huber's model:
/// `sqrt(2 log(((1-eps)/2) / (1-2 eps)))`, zero when the logarithm would be
/// negative. Exactly zero at eps = 1/3.
pub fn huber_modulus(eps: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&eps) {
        return Err(Error::InvalidParameter(format!(
            "huber_modulus needs 0 <= eps < 1/2, got {eps}"
        )));
    }
    let ratio = ((1.0 - eps) / 2.0) / (1.0 - 2.0 * eps);
    if ratio <= 1.0 {
        return Ok(0.0);
    }
    Ok((2.0 * ratio.ln()).sqrt())
}

/// Two-Gaussian total-variation surrogate
/// `1 ^ (|s1 - s2| / (s1 v s2)  v  |m1 - m2| / (sqrt(s1) v sqrt(s2)))`
/// with `s` the variances. Symmetric, zero iff the parameters coincide,
/// and equivalent to the true total variation up to universal constants.
pub fn tv_gaussian_surrogate(p: &NullParams, q: &NullParams) -> f64 {
    let var_gap = (p.sigma2 - q.sigma2).abs() / p.sigma2.max(q.sigma2);
    let mean_gap = (p.theta - q.theta).abs() / p.sigma().max(q.sigma());
    var_gap.max(mean_gap).min(1.0)
}

/// All three rates at one (k, n) point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub k: usize,
    pub n: usize,
    pub location_rate_sq: f64,
    pub variance_rate: f64,
    pub tv_rate: f64,
}

impl RatePoint {
    pub fn new(k: usize, n: usize, sigma2: f64) -> Result<Self> {
        Ok(Self {
            k,
            n,
            location_rate_sq: rate_location_sq(k, n, sigma2)?,
            variance_rate: rate_variance(k, n)?,
            tv_rate: rate_tv(k, n)?,
        })
    }
}
