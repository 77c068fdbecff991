//! Min-sup-inf Fourier location estimators.
//!
//! The estimator whitens the empirical characteristic function by the noise
//! characteristic function, recenters by a candidate location, fits the
//! averaged outlier phase inside the closed complex unit disk, and picks the
//! candidate minimising the worst-frequency residual:
//!
//! `theta_hat = argmin_mu sup_{|omega| <= tau} inf_{|zeta| <= 1}
//!     | psi_hat(omega) e^{-i omega mu} / psi_F(omega) - (n-k)/n - (k/n) zeta |`
//!
//! The inner infimum has a closed form (a disk projection), the supremum
//! runs over a finite symmetric grid, and the outer minimisation is a grid
//! search anchored at the sample median.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::ecf::{self, FrequencyGrid};
use crate::mode::sample_median;
use crate::rates::eps_location;
use crate::types::{Hyperparams, Sample};
use crate::variance::{estimate_variance_with_pilot, pilot_variance, PilotConfig};
use crate::{Error, Result};

/// Closed-form solution of the inner disk fit at one frequency.
#[derive(Debug, Clone, Copy)]
pub struct DiskFitResult {
    /// Distance left over after the best disk-constrained fit.
    pub residual: f64,
    /// The minimising zeta, projected onto the closed unit disk.
    pub zeta_opt: Complex64,
    /// Whether the disk constraint binds.
    pub saturated: bool,
}

/// Minimises `|a - (n-k)/n - (k/n) zeta|` over `|zeta| <= 1`.
///
/// Writing `w = a - (n-k)/n`, the optimum is the projection of `(n/k) w`
/// onto the disk, with residual `max(0, |w| - k/n)`.
pub fn inner_disk_fit(a: Complex64, k: usize, n: usize) -> DiskFitResult {
    debug_assert!(k < n);
    let nf = n as f64;
    let c = (nf - k as f64) / nf;
    let w = Complex64::new(a.re - c, a.im);
    let dist = (w.re * w.re + w.im * w.im).sqrt();
    if k == 0 {
        return DiskFitResult {
            residual: dist,
            zeta_opt: Complex64::new(0.0, 0.0),
            saturated: dist > 0.0,
        };
    }
    let r = k as f64 / nf;
    if dist <= r {
        DiskFitResult { residual: 0.0, zeta_opt: w / r, saturated: false }
    } else {
        DiskFitResult { residual: dist - r, zeta_opt: w / dist, saturated: true }
    }
}

/// Truncation frequency of the known-variance estimator:
/// `tau = 1 v c sqrt(log(1 + k^2 (n-2k)^2 / n^3))`.
pub fn tau_known_var(k: usize, n: usize, hp: &Hyperparams) -> f64 {
    let (kf, nf) = (k as f64, n as f64);
    let gap = nf - 2.0 * kf;
    let u = kf * kf * gap * gap / (nf * nf * nf);
    (hp.c_tau * u.ln_1p().sqrt()).max(1.0)
}

/// Truncation frequency for a general noise model with polynomially decaying
/// characteristic function, solved for the Laplace case
/// `1/psi_F(tau) = 1 + tau^2 ~ k (n-2k) / n^{3/2}`.
pub fn laplace_tau(k: usize, n: usize, hp: &Hyperparams) -> f64 {
    let (kf, nf) = (k as f64, n as f64);
    (hp.general_tau_scale * kf * (nf - 2.0 * kf) / nf.powf(1.5)).sqrt()
}

/// Interval `[sigma_-^2, sigma_+^2] = sigma2_hat (1 -+ R k / (n log(1 + k/sqrt(n))))`
/// over which the unknown-variance estimator searches the whitening
/// variance. The lower endpoint is floored at `1e-12 sigma2_hat`.
pub fn sigma_interval(sigma2_hat: f64, k: usize, n: usize, hp: &Hyperparams) -> (f64, f64) {
    let (kf, nf) = (k as f64, n as f64);
    let w = hp.r_sigma * kf / (nf * (kf / nf.sqrt()).ln_1p());
    ((sigma2_hat * (1.0 - w)).max(1e-12 * sigma2_hat), sigma2_hat * (1.0 + w))
}

/// Noise distribution of the observation model, known to the estimator.
#[derive(Clone)]
pub enum NoiseModel {
    /// `psi_F(omega) = e^{-v omega^2 / 2}` with `v` the candidate variance.
    Gaussian,
    /// Unit-scale Laplace noise, `psi_F(omega) = 1 / (1 + omega^2)`.
    Laplace,
    /// Arbitrary characteristic function; must satisfy `cf(0) = 1` and
    /// `|cf| <= 1`.
    Custom(Arc<dyn Fn(f64) -> Complex64 + Send + Sync>),
}

impl std::fmt::Debug for NoiseModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NoiseModel::Gaussian => write!(f, "Gaussian"),
            NoiseModel::Laplace => write!(f, "Laplace"),
            NoiseModel::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl NoiseModel {
    /// Characteristic function `psi_F(omega)`; the Gaussian model is
    /// parameterised by the candidate variance `v`.
    pub fn cf(&self, omega: f64, v: f64) -> Complex64 {
        match self {
            NoiseModel::Gaussian => Complex64::new((-0.5 * v * omega * omega).exp(), 0.0),
            NoiseModel::Laplace => Complex64::new(1.0 / (1.0 + omega * omega), 0.0),
            NoiseModel::Custom(f) => f(omega),
        }
    }

    /// Whitening multiplier `1/psi_F(omega)`. Errors when the multiplier
    /// overflows (Gaussian exponent > 700: tau is mis-set, not a value to
    /// skip silently) or the characteristic function vanishes on the grid.
    fn inv_cf(&self, omega: f64, v: f64) -> Result<Complex64> {
        match self {
            NoiseModel::Gaussian => {
                let half_exponent = 0.5 * v * omega * omega;
                if half_exponent > 700.0 {
                    return Err(Error::WhiteningOverflow { omega, v });
                }
                Ok(Complex64::new(half_exponent.exp(), 0.0))
            }
            _ => {
                let cf = self.cf(omega, v);
                if cf.norm() < 1e-300 {
                    return Err(Error::NoiseCfVanishes { omega });
                }
                Ok(cf.finv())
            }
        }
    }
}

#[inline]
fn residual_at(psi: Complex64, omega: f64, mu: f64, mult: Complex64, c: f64, r: f64) -> f64 {
    let (s, co) = (omega * mu).sin_cos();
    let rotated = Complex64::new(psi.re * co + psi.im * s, psi.im * co - psi.re * s);
    let a = rotated * mult;
    let (wr, wi) = (a.re - c, a.im);
    ((wr * wr + wi * wi).sqrt() - r).max(0.0)
}

/// Worst-frequency disk-fit residual of the whitened, recentered ECF over
/// the grid. Exactly zero on noiseless data with `mu` at the truth,
/// `v = 0`, and the contamination inside the disk budget.
pub fn objective(
    sample: &Sample,
    mu: f64,
    v: f64,
    k: usize,
    grid: &FrequencyGrid,
    noise: &NoiseModel,
) -> Result<f64> {
    let n = sample.n();
    let nf = n as f64;
    let (c, r) = ((nf - k as f64) / nf, k as f64 / nf);
    let mut sup: f64 = 0.0;
    for &omega in &grid.points {
        let mult = noise.inv_cf(omega, v)?;
        let psi = ecf::ecf_eval(sample, omega);
        sup = sup.max(residual_at(psi, omega, mu, mult, c, r));
    }
    Ok(sup)
}

/// Location estimate together with the grids that produced it.
#[derive(Debug, Clone)]
pub struct LocationEstimate {
    pub theta_hat: f64,
    /// Fitted whitening variance; absent for the known-variance and
    /// general-noise estimators.
    pub v_hat: Option<f64>,
    pub objective_value: f64,
    pub mu_grid_used: MuGridSpec,
    pub tau_used: f64,
}

/// Candidate grid for the location search: `center + j * step` for
/// `j = -half_count ..= half_count`, anchored at the sample median.
#[derive(Debug, Clone, Copy)]
pub struct MuGridSpec {
    pub center: f64,
    pub step: f64,
    pub half_count: usize,
}

impl MuGridSpec {
    fn build(center: f64, scale: f64, k: usize, n: usize, hp: &Hyperparams) -> Self {
        let halfwidth = hp.mu_grid_halfwidth_mult * scale * (n as f64).ln().sqrt();
        let step = (hp.mu_grid_step_mult * scale * eps_location(k.max(1), n))
            .min(halfwidth / 8.0);
        let half_count = (halfwidth / step).ceil() as usize;
        Self { center, step, half_count }
    }

    pub fn len(&self) -> usize {
        2 * self.half_count + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn point(&self, j: isize) -> f64 {
        self.center + j as f64 * self.step
    }
}

/// Cached per-grid state shared by every (mu, v) candidate.
struct GridSearch {
    omegas: Vec<f64>,
    psi: Vec<Complex64>,
    c: f64,
    r: f64,
}

impl GridSearch {
    /// ECF over the nonnegative half of a symmetric grid. Conjugate
    /// symmetry makes the residual even in omega, so half the grid carries
    /// the full supremum.
    fn new(sample: &Sample, tau: f64, n_grid_mult: f64) -> Self {
        let n = sample.n();
        let nf = n as f64;
        let max_step = n_grid_mult / (nf * nf.ln()).sqrt();
        let grid = FrequencyGrid::symmetric(tau, max_step);
        let omegas: Vec<f64> = grid.half_points().to_vec();
        let psi: Vec<Complex64> = if omegas.len() * n > 1 << 16 {
            omegas.par_iter().map(|&w| ecf::ecf_eval(sample, w)).collect()
        } else {
            omegas.iter().map(|&w| ecf::ecf_eval(sample, w)).collect()
        };
        Self { omegas, psi, c: 0.0, r: 0.0 }
    }

    fn with_budget(mut self, k: usize, n: usize) -> Self {
        let nf = n as f64;
        self.c = (nf - k as f64) / nf;
        self.r = k as f64 / nf;
        self
    }

    /// Per-candidate suprema of the residual over the grid for every
    /// whitening column at once; the `e^{-i omega mu}` rotation is shared
    /// across columns. A column is abandoned as soon as its running sup
    /// strictly exceeds `early_stop` (its returned value is then only a
    /// witness that the candidate loses), and the omega scan stops when
    /// every column is abandoned.
    fn sup_residual_joint(&self, mu: f64, columns: &[Vec<Complex64>], early_stop: f64, sups: &mut [f64]) {
        sups.fill(0.0);
        let mut alive = columns.len();
        for (i, (&omega, &psi)) in self.omegas.iter().zip(&self.psi).enumerate() {
            let (s, co) = (omega * mu).sin_cos();
            let rotated = Complex64::new(psi.re * co + psi.im * s, psi.im * co - psi.re * s);
            for (sup, column) in sups.iter_mut().zip(columns) {
                if *sup > early_stop {
                    continue;
                }
                let a = rotated * column[i];
                let (wr, wi) = (a.re - self.c, a.im);
                let res = ((wr * wr + wi * wi).sqrt() - self.r).max(0.0);
                if res > *sup {
                    *sup = res;
                    if *sup > early_stop {
                        alive -= 1;
                        if alive == 0 {
                            return;
                        }
                    }
                }
            }
        }
    }
}

struct Best {
    value: f64,
    dist: f64,
    mu: f64,
    v: f64,
}

impl Best {
    fn new() -> Self {
        Self { value: f64::INFINITY, dist: f64::INFINITY, mu: f64::NAN, v: f64::NAN }
    }

    /// Ties break toward the candidate closest to the grid center (the
    /// sample median), then the smaller mu, then the smaller v.
    fn offer(&mut self, value: f64, dist: f64, mu: f64, v: f64) {
        let take = value < self.value
            || (value == self.value
                && (dist < self.dist
                    || (dist == self.dist && (mu < self.mu || (mu == self.mu && v < self.v)))));
        if take {
            *self = Self { value, dist, mu, v };
        }
    }
}

fn argmin_search(
    search: &GridSearch,
    mu_grid: &MuGridSpec,
    v_candidates: &[(f64, Vec<Complex64>)],
) -> (f64, f64, f64) {
    let half = mu_grid.half_count as isize;
    let columns: Vec<Vec<Complex64>> =
        v_candidates.iter().map(|(_, mults)| mults.clone()).collect();
    let mut sups = vec![0.0; columns.len()];
    let mut best = Best::new();
    for j in -half..=half {
        let mu = mu_grid.point(j);
        let dist = (mu - mu_grid.center).abs();
        search.sup_residual_joint(mu, &columns, best.value, &mut sups);
        for (&sup, (v, _)) in sups.iter().zip(v_candidates) {
            if sup <= best.value {
                best.offer(sup, dist, mu, *v);
            }
        }
    }
    (best.mu, best.v, best.value)
}

fn check_estimation_inputs(sample: &Sample, k: usize) -> Result<()> {
    let n = sample.n();
    if n < 4 {
        return Err(Error::SampleTooSmall { n, min: 4 });
    }
    if 2 * k >= n {
        return Err(Error::KNotIdentifiable { k, n });
    }
    Ok(())
}

/// Known-variance estimator: grid minimisation at the fixed whitening
/// variance `sigma2`, with `tau` from [`tau_known_var`].
pub fn estimate_location_known_var(
    sample: &Sample,
    k: usize,
    sigma2: f64,
    hp: &Hyperparams,
) -> Result<LocationEstimate> {
    check_estimation_inputs(sample, k)?;
    if !(sigma2 > 0.0) {
        return Err(Error::InvalidParameter(format!("sigma2 must be positive, got {sigma2}")));
    }
    let tau = tau_known_var(k, sample.n(), hp);
    estimate_on_grids(sample, k, sigma2, sigma2.sqrt(), tau, None, &NoiseModel::Gaussian, hp)
}

/// Unknown-variance estimator: pilot variance, rate-optimal variance
/// estimate, then a joint grid minimisation over the location and a
/// whitening variance confined to `[sigma_-^2, sigma_+^2]`.
pub fn estimate_location_unknown_var(
    sample: &Sample,
    k: usize,
    hp: &Hyperparams,
    seed: u64,
) -> Result<LocationEstimate> {
    check_estimation_inputs(sample, k)?;
    let pilot = pilot_variance(sample, &PilotConfig::from_defaults(sample.n(), hp, seed))?;
    let var = estimate_variance_with_pilot(sample, k.max(1), pilot, hp)?;
    estimate_location_with_variance(sample, k, var.sigma2_hat, hp)
}

/// Unknown-variance estimator with the variance stage already done; used by
/// the Lepski loop, which shares one pilot across all candidate k.
pub fn estimate_location_with_variance(
    sample: &Sample,
    k: usize,
    sigma2_hat: f64,
    hp: &Hyperparams,
) -> Result<LocationEstimate> {
    check_estimation_inputs(sample, k)?;
    let n = sample.n();
    let sigma_hat = sigma2_hat.sqrt();
    let (lo, hi) = sigma_interval(sigma2_hat, k.max(1), n, hp);
    let tau = tau_known_var(k, n, hp) / sigma_hat;
    let points = hp.v_grid_points;
    let vs: Vec<f64> = (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect();
    estimate_on_grids(sample, k, sigma2_hat, sigma_hat, tau, Some(vs), &NoiseModel::Gaussian, hp)
}

/// Deconvolution variant for a general known noise distribution; `tau` must
/// be supplied (see [`laplace_tau`]). Data are assumed on unit scale. With
/// `NoiseModel::Gaussian` this reproduces the known-variance estimator at
/// `sigma2 = 1` bit for bit on the same grids.
pub fn estimate_location_general(
    sample: &Sample,
    k: usize,
    noise: &NoiseModel,
    tau: f64,
    hp: &Hyperparams,
) -> Result<LocationEstimate> {
    check_estimation_inputs(sample, k)?;
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
    }
    estimate_on_grids(sample, k, 1.0, 1.0, tau, None, noise, hp)
}

#[allow(clippy::too_many_arguments)]
fn estimate_on_grids(
    sample: &Sample,
    k: usize,
    v_fixed: f64,
    mu_scale: f64,
    tau: f64,
    v_grid: Option<Vec<f64>>,
    noise: &NoiseModel,
    hp: &Hyperparams,
) -> Result<LocationEstimate> {
    let n = sample.n();
    let search = GridSearch::new(sample, tau, hp.omega_grid_step_mult).with_budget(k, n);
    let joint = v_grid.is_some();
    let vs = v_grid.unwrap_or_else(|| vec![v_fixed]);
    let mut v_candidates = Vec::with_capacity(vs.len());
    for v in vs {
        let mults = search
            .omegas
            .iter()
            .map(|&w| noise.inv_cf(w, v))
            .collect::<Result<Vec<Complex64>>>()?;
        v_candidates.push((v, mults));
    }
    let mu_grid = MuGridSpec::build(sample_median(sample), mu_scale, k, n, hp);
    let (theta_hat, v_hat, objective_value) = argmin_search(&search, &mu_grid, &v_candidates);
    Ok(LocationEstimate {
        theta_hat,
        v_hat: joint.then_some(v_hat),
        objective_value,
        mu_grid_used: mu_grid,
        tau_used: tau,
    })
}
