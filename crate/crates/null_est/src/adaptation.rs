//! Lepski's method for unknown contamination count: run the estimator at
//! every k on a geometrically thinned grid, form confidence intervals with
//! rate-matched widths, and take the first (smallest-k) nonempty suffix
//! intersection.

use rayon::prelude::*;

use crate::location::estimate_location_with_variance;
use crate::rates::{eps_location, eps_variance};
use crate::types::{Hyperparams, NullParams, Sample};
use crate::variance::{estimate_variance_with_pilot, pilot_variance, PilotConfig};
use crate::{Error, Result};

/// Full record of one Lepski run.
#[derive(Debug, Clone)]
pub struct LepskiTrace {
    pub k_grid: Vec<usize>,
    /// Per-k interval as (center, halfwidth), aligned with `k_grid`.
    pub intervals: Vec<(f64, f64)>,
    /// Smallest grid k whose suffix intersection is nonempty.
    pub k_prime: Option<usize>,
    pub estimate: f64,
    pub fallback_used: bool,
}

/// Geometrically thinned candidate grid over `{1, ..., floor(n/2 - c sqrt(n))}`,
/// always containing both endpoints.
pub fn lepski_k_grid(n: usize, hp: &Hyperparams) -> Vec<usize> {
    let top = (n as f64 / 2.0 - hp.lepski_c_delta * (n as f64).sqrt()).floor();
    let top = top.min((n as f64 - 1.0) / 2.0).floor() as isize;
    if top < 1 {
        return Vec::new();
    }
    let top = top as usize;
    let mut grid = vec![1usize];
    let mut k = 1usize;
    while k < top {
        k = ((k as f64 * hp.lepski_ratio).ceil() as usize).max(k + 1).min(top);
        grid.push(k);
    }
    grid
}

/// Smallest index whose suffix intersection is nonempty, together with that
/// intersection. Suffix intersections shrink as the start index decreases,
/// so nonemptiness is monotone in the start index.
pub fn suffix_intersection(intervals: &[(f64, f64)]) -> Option<(usize, f64, f64)> {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    let mut best: Option<(usize, f64, f64)> = None;
    for (idx, (center, halfwidth)) in intervals.iter().enumerate().rev() {
        lo = lo.max(center - halfwidth);
        hi = hi.min(center + halfwidth);
        if lo <= hi {
            best = Some((idx, lo, hi));
        } else {
            break;
        }
    }
    best
}

fn lepski_run<F>(k_grid: Vec<usize>, halfwidth: F, centers: Vec<f64>, fallback: f64) -> LepskiTrace
where
    F: Fn(usize) -> f64,
{
    let intervals: Vec<(f64, f64)> =
        k_grid.iter().zip(&centers).map(|(&k, &c)| (c, halfwidth(k))).collect();
    match suffix_intersection(&intervals) {
        Some((idx, lo, hi)) => LepskiTrace {
            k_prime: Some(k_grid[idx]),
            estimate: lo + (hi - lo) / 2.0,
            fallback_used: false,
            k_grid,
            intervals,
        },
        None => LepskiTrace {
            k_prime: None,
            estimate: fallback,
            fallback_used: true,
            k_grid,
            intervals,
        },
    }
}

/// Adaptive location estimator. One pilot draw is shared by all candidate
/// k; the per-k variance and location stages run in parallel.
pub fn lepski_location(sample: &Sample, hp: &Hyperparams, seed: u64) -> Result<LepskiTrace> {
    let pilot = pilot_variance(sample, &PilotConfig::from_defaults(sample.n(), hp, seed))?;
    lepski_location_with_pilot(sample, pilot, hp)
}

fn lepski_location_with_pilot(
    sample: &Sample,
    pilot: f64,
    hp: &Hyperparams,
) -> Result<LepskiTrace> {
    let n = sample.n();
    let k_grid = lepski_k_grid(n, hp);
    if k_grid.is_empty() {
        return Err(Error::SampleTooSmall { n, min: (4.0 * hp.lepski_c_delta.powi(2)).ceil() as usize });
    }
    let centers: Vec<f64> = k_grid
        .par_iter()
        .map(|&k| {
            let var = estimate_variance_with_pilot(sample, k, pilot, hp)?;
            let est = estimate_location_with_variance(sample, k, var.sigma2_hat, hp)?;
            Ok(est.theta_hat)
        })
        .collect::<Result<_>>()?;
    let sigma_tilde = pilot.sqrt();
    Ok(lepski_run(k_grid, |k| hp.lepski_c_loc * sigma_tilde * eps_location(k, n), centers, 0.0))
}

/// Adaptive variance estimator; the fallback value is 1.
pub fn lepski_variance(sample: &Sample, hp: &Hyperparams, seed: u64) -> Result<LepskiTrace> {
    let pilot = pilot_variance(sample, &PilotConfig::from_defaults(sample.n(), hp, seed))?;
    lepski_variance_with_pilot(sample, pilot, hp)
}

fn lepski_variance_with_pilot(
    sample: &Sample,
    pilot: f64,
    hp: &Hyperparams,
) -> Result<LepskiTrace> {
    let n = sample.n();
    if n < 8 {
        return Err(Error::SampleTooSmall { n, min: 8 });
    }
    let k_grid = lepski_k_grid(n, hp);
    if k_grid.is_empty() {
        return Err(Error::SampleTooSmall { n, min: (4.0 * hp.lepski_c_delta.powi(2)).ceil() as usize });
    }
    let centers: Vec<f64> = k_grid
        .par_iter()
        .map(|&k| Ok(estimate_variance_with_pilot(sample, k, pilot, hp)?.sigma2_hat))
        .collect::<Result<_>>()?;
    Ok(lepski_run(k_grid, |k| hp.lepski_c_var * pilot * eps_variance(k, n), centers, 1.0))
}

/// Adaptive null estimate combining both Lepski runs under a single pilot.
#[derive(Debug, Clone)]
pub struct AdaptiveNullEstimate {
    pub params: NullParams,
    pub pilot_sigma2: f64,
    pub location: LepskiTrace,
    pub variance: LepskiTrace,
}

/// Estimates `N(theta_hat, sigma2_hat)` with no knowledge of k, sharing
/// one pilot draw and one per-k variance pass between the two Lepski runs.
/// The variance fallback keeps `sigma2_hat` positive, so the result is
/// always a valid Gaussian; callers holding a ground truth can score it
/// with [`crate::rates::tv_gaussian_surrogate`].
pub fn adaptive_null_estimate(
    sample: &Sample,
    hp: &Hyperparams,
    seed: u64,
) -> Result<AdaptiveNullEstimate> {
    let n = sample.n();
    let pilot = pilot_variance(sample, &PilotConfig::from_defaults(n, hp, seed))?;
    if n < 8 {
        return Err(Error::SampleTooSmall { n, min: 8 });
    }
    let k_grid = lepski_k_grid(n, hp);
    if k_grid.is_empty() {
        return Err(Error::SampleTooSmall { n, min: (4.0 * hp.lepski_c_delta.powi(2)).ceil() as usize });
    }
    let centers: Vec<(f64, f64)> = k_grid
        .par_iter()
        .map(|&k| {
            let var = estimate_variance_with_pilot(sample, k, pilot, hp)?;
            let loc = estimate_location_with_variance(sample, k, var.sigma2_hat, hp)?;
            Ok((loc.theta_hat, var.sigma2_hat))
        })
        .collect::<Result<_>>()?;
    let sigma_tilde = pilot.sqrt();
    let location = lepski_run(
        k_grid.clone(),
        |k| hp.lepski_c_loc * sigma_tilde * eps_location(k, n),
        centers.iter().map(|c| c.0).collect(),
        0.0,
    );
    let variance = lepski_run(
        k_grid,
        |k| hp.lepski_c_var * pilot * eps_variance(k, n),
        centers.iter().map(|c| c.1).collect(),
        1.0,
    );
    let sigma2 = if variance.estimate > 0.0 { variance.estimate } else { 1.0 };
    Ok(AdaptiveNullEstimate {
        params: NullParams::new(location.estimate, sigma2)?,
        pilot_sigma2: pilot,
        location,
        variance,
    })
}
