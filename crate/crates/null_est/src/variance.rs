//! Variance estimation: a random-subset pilot giving the right order of
//! magnitude, and the rate-optimal frequency-window estimator
//! `sigma2_hat = inf_{a <= omega <= b} -2 log |psi_hat(omega)| / omega^2`
//! with `b = 100 a`. The window infimum removes the worst-case bias a
//! single-frequency estimator suffers when the shifts sit at `pi/omega`.

use rayon::prelude::*;

use crate::ecf::ecf_norm;
use crate::rng;
use crate::types::{Hyperparams, Sample};
use crate::{Error, Result};

/// Random-subset pilot configuration: `m` subsets of size `ell`.
#[derive(Debug, Clone, Copy)]
pub struct PilotConfig {
    pub m: usize,
    pub ell: usize,
    pub seed: u64,
}

impl PilotConfig {
    /// `m = min(ceil(n^c1), m_cap)` subsets of size
    /// `ell = min(n, max(3, ceil(c2 ln n)))`.
    pub fn from_defaults(n: usize, hp: &Hyperparams, seed: u64) -> Self {
        let m = (n as f64).powf(hp.c1_pilot).ceil() as usize;
        let ell = (hp.c2_pilot * (n as f64).ln()).ceil().max(3.0) as usize;
        Self { m: m.min(hp.m_cap).max(1), ell: ell.min(n), seed }
    }
}

/// Unbiased sample variance of `xs`, centered at the first element before
/// accumulating so the result is exact under large common offsets.
fn subset_variance(xs: &[f64]) -> f64 {
    let anchor = xs[0];
    let ell = xs.len() as f64;
    let mean = xs.iter().map(|x| x - anchor).sum::<f64>() / ell;
    let ss = xs.iter().map(|x| (x - anchor - mean).powi(2)).sum::<f64>();
    ss / (ell - 1.0)
}

/// Minimum over `m` uniformly drawn subsets of the unbiased subset
/// variance. Subsets are drawn without replacement within each draw,
/// independently across draws, from per-draw keyed streams so the result
/// does not depend on the thread schedule.
pub fn pilot_variance(sample: &Sample, cfg: &PilotConfig) -> Result<f64> {
    if cfg.ell < 2 || cfg.ell > sample.n() || cfg.m < 1 {
        return Err(Error::InvalidParameter(format!(
            "pilot needs 2 <= ell <= n and m >= 1, got ell = {}, m = {}, n = {}",
            cfg.ell,
            cfg.m,
            sample.n()
        )));
    }
    let values = sample.values();
    let n = values.len();
    let best = (0..cfg.m)
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(cfg.ell),
            |buf, r| {
                let mut rng = rng::stream(cfg.seed, &[0x70696c6f74, r as u64]);
                buf.clear();
                let idx = rand::seq::index::sample(&mut rng, n, cfg.ell);
                buf.extend(idx.iter().map(|i| values[i]));
                subset_variance(buf)
            },
        )
        .filter(|v| *v > 0.0)
        .reduce(|| f64::INFINITY, f64::min);
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::DegeneratePilot)
    }
}

/// Frequency window of the variance estimator:
/// `a = c_a sigma_tilde^-1 sqrt(1 v log(e k^2 / n))`, `b = 100 a`.
pub fn variance_frequency_window(
    sigma_tilde: f64,
    k: usize,
    n: usize,
    hp: &Hyperparams,
) -> (f64, f64) {
    let (kf, nf) = (k as f64, n as f64);
    let log = (std::f64::consts::E * kf * kf / nf).ln().max(1.0);
    let a = hp.c_a / sigma_tilde * log.sqrt();
    (a, 100.0 * a)
}

/// The frequency a single-frequency comparator commits to, of order
/// `sigma_tilde^-1 sqrt(1 v log(e k^2 / n))`. The constant 1/2 keeps the
/// frequency inside the band where the ECF signal exceeds the sampling
/// noise floor for k up to n/2, which is the tuning that makes the
/// comparator strongest.
pub fn single_frequency_omega(sigma_tilde: f64, k: usize, n: usize) -> f64 {
    let (kf, nf) = (k as f64, n as f64);
    0.5 * (std::f64::consts::E * kf * kf / nf).ln().max(1.0).sqrt() / sigma_tilde
}

/// Variance estimate with the window that produced it (`b_used = 100 a_used`).
#[derive(Debug, Clone, Copy)]
pub struct VarianceEstimate {
    pub sigma2_hat: f64,
    pub a_used: f64,
    pub b_used: f64,
    pub omega_argmin: f64,
}

/// Rate-optimal variance estimator: pilot, then the window infimum.
pub fn estimate_variance(
    sample: &Sample,
    k: usize,
    hp: &Hyperparams,
    seed: u64,
) -> Result<VarianceEstimate> {
    if sample.n() < 8 {
        return Err(Error::SampleTooSmall { n: sample.n(), min: 8 });
    }
    if k == 0 || 2 * k >= sample.n() {
        return Err(Error::KNotIdentifiable { k, n: sample.n() });
    }
    let pilot = pilot_variance(sample, &PilotConfig::from_defaults(sample.n(), hp, seed))?;
    estimate_variance_with_pilot(sample, k, pilot, hp)
}

/// Window infimum of `-2 log N_hat(omega) / omega^2` over a log-spaced grid
/// on `[a, 100a]`, excluding grid points where the ECF modulus sits at or
/// below the sampling noise floor `~6/sqrt(n)` (the sup-norm deviation of
/// the ECF is O(1/sqrt(n)); below it, the log measures noise and the
/// infimum would lock onto it).
pub fn estimate_variance_with_pilot(
    sample: &Sample,
    k: usize,
    pilot_sigma2: f64,
    hp: &Hyperparams,
) -> Result<VarianceEstimate> {
    let n = sample.n();
    let (a, b) = variance_frequency_window(pilot_sigma2.sqrt(), k, n, hp);
    let guard = (6.0 / (n as f64).sqrt()).min(0.25);
    let points = hp.var_grid_points;
    let ratio = (b / a).ln();
    let scan = |i: usize| -> Option<(f64, f64)> {
        let omega = a * (ratio * i as f64 / (points - 1) as f64).exp();
        let norm = ecf_norm(sample, omega);
        (norm > guard).then(|| (-2.0 * norm.ln() / (omega * omega), omega))
    };
    let fold = |acc: Option<(f64, f64)>, cand: Option<(f64, f64)>| match (acc, cand) {
        (Some(best), Some(c)) => Some(if c.0 < best.0 { c } else { best }),
        (x, None) => x,
        (None, y) => y,
    };
    let best = if points * n > 1 << 18 {
        (0..points).into_par_iter().map(scan).reduce(|| None, fold)
    } else {
        (0..points).map(scan).fold(None, fold)
    };
    match best {
        Some((value, omega)) => Ok(VarianceEstimate {
            sigma2_hat: value,
            a_used: a,
            b_used: 100.0 * a,
            omega_argmin: omega,
        }),
        None => Err(Error::EcfDegenerate { a, b }),
    }
}

/// Single-frequency comparator `-2 log N_hat(omega) / omega^2`. The caller
/// picked the frequency, so only a genuinely vanishing modulus (below
/// `n^-2`) is an error; noise-floored values are returned as-is.
pub fn single_frequency_variance(sample: &Sample, omega: f64) -> Result<f64> {
    let norm = ecf_norm(sample, omega);
    let guard = (sample.n() as f64).powi(-2);
    if norm <= guard {
        return Err(Error::EcfBelowGuard { omega, modulus: norm, guard });
    }
    Ok(-2.0 * norm.ln() / (omega * omega))
}

/// Grid maximum of `(1/k) sum_j cos(omega gamma_j)` over `[alpha, 100 alpha]`.
/// Bounded below by -1/5 up to grid slack, for any shifts.
pub fn cosine_supremum(gammas: &[f64], alpha: f64, grid_points: usize) -> f64 {
    assert!(alpha > 0.0 && grid_points >= 2 && !gammas.is_empty());
    let k = gammas.len() as f64;
    let mut sup = f64::NEG_INFINITY;
    for i in 0..grid_points {
        let omega = alpha * (1.0 + 99.0 * i as f64 / (grid_points - 1) as f64);
        let mean = gammas.iter().map(|g| (omega * g).cos()).sum::<f64>() / k;
        sup = sup.max(mean);
    }
    sup
}
