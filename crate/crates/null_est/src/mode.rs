//! Box-kernel mode estimator for the inconsistency regime, where the
//! bandwidth widens with `n/(n-2k)^2` instead of shrinking, plus the
//! sample median baseline.

use crate::types::{Hyperparams, Sample};
use crate::{Error, Result};

/// Mode estimate: the midpoint of the leftmost maximal window.
#[derive(Debug, Clone, Copy)]
pub struct ModeEstimate {
    pub theta_hat: f64,
    pub h_used: f64,
    /// Number of points in the best window.
    pub max_count: usize,
}

/// Global maximiser of `G_h(t) = (1/2nh) sum_j 1{|t - X_j| <= h}`, computed
/// exactly by a sliding window over the sorted sample. The maximiser set is
/// a union of intervals with endpoints `X_j +- h`; the leftmost maximal
/// interval is `[x_{i+c-1} - h, x_i + h]` for the first anchor `i`
/// achieving the best count `c`, and its midpoint is returned.
pub fn kernel_mode(sample: &Sample, h: f64) -> Result<ModeEstimate> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("bandwidth must be positive, got {h}")));
    }
    let mut xs = sample.values().to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    let width = 2.0 * h;
    let (mut best_i, mut best_count) = (0usize, 0usize);
    let mut hi = 0usize;
    for i in 0..n {
        if hi < i {
            hi = i;
        }
        while hi + 1 < n && xs[hi + 1] - xs[i] <= width {
            hi += 1;
        }
        let count = hi - i + 1;
        if count > best_count {
            best_count = count;
            best_i = i;
        }
    }
    let lo = xs[best_i];
    let hi_x = xs[best_i + best_count - 1];
    Ok(ModeEstimate { theta_hat: lo + (hi_x - lo) / 2.0, h_used: h, max_count: best_count })
}

/// Bandwidth of the mode estimator:
/// `h = C1 sqrt(1 v log(L_delta n / (n-2k)^2))`.
pub fn mode_bandwidth(k: usize, n: usize, hp: &Hyperparams) -> Result<f64> {
    if 2 * k >= n {
        return Err(Error::KNotIdentifiable { k, n });
    }
    let (kf, nf) = (k as f64, n as f64);
    let gap = nf - 2.0 * kf;
    Ok(hp.mode_c1 * (hp.l_delta * nf / (gap * gap)).ln().max(1.0).sqrt())
}

/// Lower median: the order statistic of rank `ceil(n/2)`, no interpolation.
pub fn sample_median(sample: &Sample) -> f64 {
    let mut xs = sample.values().to_vec();
    let rank = xs.len().div_ceil(2) - 1;
    *xs.select_nth_unstable_by(rank, f64::total_cmp).1
}
