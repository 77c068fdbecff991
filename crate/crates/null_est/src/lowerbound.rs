//! Numerical realization of the lower-bound constructions: the perturbation
//! density `p1 = p0 + Delta`, the mixture pair `(f0, f1)` whose Fourier
//! transforms agree on `[-tau, tau]`, and the two-block prior for the
//! inconsistency regime.
//!
//! `Delta` is the inverse transform of a purely imaginary odd function
//! supported on `[-2 tau, 2 tau]`, which reduces to two sine transforms:
//!
//! `Delta(x) = -(1/pi) [ int_0^tau g(t) sin(tx) dt
//!                     + int_tau^{2tau} g_taper(t) sin(tx) dt ]`
//!
//! with `g(t) = 2 ((1-lambda)/lambda) sin(t mu)` and a linear taper on
//! `[tau, 2tau]`. Both integrals have elementary antiderivatives; the
//! closed form is used for grid work and is cross-checked against the
//! adaptive-Simpson route (`delta_eval`) in tests.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::quad::{adaptive_simpson, filon_sin, simpson_uniform};
use crate::rng;
use crate::types::{Hyperparams, NullParams, Sample};
use crate::{Error, Result};

fn phi(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

fn norm_cdf(x: f64) -> f64 {
    0.5 * (1.0 + statrs::function::erf::erf(x / std::f64::consts::SQRT_2))
}

/// Parameters of the CF-matching construction at contamination level `eps`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PriorConstruction {
    pub eps: f64,
    /// `lambda = eps / (1 + 2 eps)`.
    pub lambda: f64,
    /// `tau = 1 v B_c sqrt(log(e n eps^2 (1-2eps)^2))`.
    pub tau: f64,
    /// Separation scale `mu = c0 lambda / tau`.
    pub mu: f64,
    pub c0: f64,
    pub bc: f64,
    pub n: usize,
}

impl PriorConstruction {
    pub fn new(eps: f64, n: usize, hp: &Hyperparams) -> Result<Self> {
        if !(eps > 0.0 && eps <= 0.5) {
            return Err(Error::InvalidParameter(format!("eps must be in (0, 1/2], got {eps}")));
        }
        let lambda = eps / (1.0 + 2.0 * eps);
        let arg = std::f64::consts::E * n as f64 * eps * eps * (1.0 - 2.0 * eps).powi(2);
        let tau = if arg > 1.0 { (hp.bc * arg.ln().sqrt()).max(1.0) } else { 1.0 };
        Self::from_parts(eps, lambda, tau, hp.c0, hp.bc, n)
    }

    /// Direct construction from `(lambda, tau)`; used when the pieces are
    /// pinned independently of `(eps, n)`.
    pub fn from_parts(
        eps: f64,
        lambda: f64,
        tau: f64,
        c0: f64,
        bc: f64,
        n: usize,
    ) -> Result<Self> {
        if !(lambda > 0.0 && lambda <= 0.5) {
            return Err(Error::InvalidParameter(format!("lambda must be in (0, 1/2], got {lambda}")));
        }
        if !(tau >= 1.0) {
            return Err(Error::InvalidParameter(format!("tau must be >= 1, got {tau}")));
        }
        if !(c0 > 0.0) {
            return Err(Error::InvalidParameter(format!("c0 must be positive, got {c0}")));
        }
        Ok(Self { eps, lambda, tau, mu: c0 * lambda / tau, c0, bc, n })
    }

    /// Imaginary part of the frequency profile on `[0, 2 tau]`: the sine
    /// ramp followed by the linear taper.
    fn g(&self, t: f64) -> f64 {
        let amp = 2.0 * (1.0 - self.lambda) / self.lambda;
        if t < self.tau {
            amp * (t * self.mu).sin()
        } else if t <= 2.0 * self.tau {
            amp * (self.tau * self.mu).sin() * (2.0 * self.tau - t) / self.tau
        } else {
            0.0
        }
    }
}

/// Two-branch heavy-tailed base density: `tau/4` inside `[-1/tau, 1/tau]`,
/// `1/(4 tau x^2)` outside.
pub fn p0_density(x: f64, tau: f64) -> f64 {
    debug_assert!(tau > 0.0);
    if x.abs() <= 1.0 / tau {
        tau / 4.0
    } else {
        1.0 / (4.0 * tau * x * x)
    }
}

/// CDF of `p0`.
pub fn p0_cdf(x: f64, tau: f64) -> f64 {
    if x <= -1.0 / tau {
        1.0 / (4.0 * tau * (-x))
    } else if x <= 1.0 / tau {
        0.25 + tau / 4.0 * (x + 1.0 / tau)
    } else {
        1.0 - 1.0 / (4.0 * tau * x)
    }
}

/// Quantile function of `p0`.
pub fn p0_quantile(u: f64, tau: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&u));
    if u < 0.25 {
        -1.0 / (4.0 * tau * u.max(f64::MIN_POSITIVE))
    } else if u <= 0.75 {
        (u - 0.5) * 4.0 / tau
    } else {
        1.0 / (4.0 * tau * (1.0 - u).max(f64::MIN_POSITIVE))
    }
}

fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        1.0 - z * z / 6.0 + z * z * z * z / 120.0
    } else {
        z.sin() / z
    }
}

/// `int_0^tau sin(t mu) sin(t x) dt`, written through sinc so the
/// coincident-frequency limit is stable.
fn sine_ramp_integral(x: f64, tau: f64, mu: f64) -> f64 {
    0.5 * tau * (sinc((mu - x) * tau) - sinc((mu + x) * tau))
}

/// `int_tau^{2tau} ((2tau - t)/tau) sin(t x) dt`; cancellation-free form
/// `tau (z cos z + sin z - sin 2z) / z^2` with `z = tau x`.
fn taper_integral(x: f64, tau: f64) -> f64 {
    let z = tau * x;
    if z.abs() < 0.01 {
        tau * (2.0 / 3.0 * z - 13.0 / 60.0 * z * z * z)
    } else {
        tau * (z * z.cos() + z.sin() - (2.0 * z).sin()) / (z * z)
    }
}

/// Closed-form `Delta(x)`; odd, with `|Delta(x)| <~ c0 / (tau x^2)` in the
/// tail.
pub fn delta_closed(x: f64, pc: &PriorConstruction) -> f64 {
    let amp = 2.0 * (1.0 - pc.lambda) / pc.lambda;
    let ramp = sine_ramp_integral(x, pc.tau, pc.mu);
    let taper = (pc.tau * pc.mu).sin() * taper_integral(x, pc.tau);
    -(amp / PI) * (ramp + taper)
}

/// `Delta(x)` by adaptive Simpson on the two sine transforms; the
/// specification route, kept independent of [`delta_closed`].
pub fn delta_eval(x: f64, pc: &PriorConstruction, quad_tol: f64) -> Result<f64> {
    if !(quad_tol <= 1e-8 && quad_tol > 0.0) {
        return Err(Error::InvalidParameter(format!("quad_tol must be in (0, 1e-8], got {quad_tol}")));
    }
    let ramp = adaptive_simpson(&|t| pc.g(t) * (t * x).sin(), 0.0, pc.tau, quad_tol)?;
    let taper = adaptive_simpson(&|t| pc.g(t) * (t * x).sin(), pc.tau, 2.0 * pc.tau, quad_tol)?;
    Ok(-(ramp + taper) / PI)
}

/// Grid on which `p1` is scanned and integrated.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityGrid {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    pub quadrature: QuadratureRule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadratureRule {
    Trapezoid,
    Simpson,
}

impl DensityGrid {
    /// Uniform grid with an odd point count; values start empty and are
    /// filled by [`verify_p1`].
    pub fn uniform(lo: f64, hi: f64, points: usize, quadrature: QuadratureRule) -> Self {
        let points = if points % 2 == 0 { points + 1 } else { points };
        let h = (hi - lo) / (points - 1) as f64;
        let xs = (0..points).map(|i| lo + i as f64 * h).collect();
        Self { xs, values: Vec::new(), quadrature }
    }

    /// Default verification grid: covers all but 1e-4 of the `p0` mass,
    /// resolves the `Delta` oscillation, and puts the `p0` kinks at
    /// `+-1/tau` on Simpson panel boundaries (spacing `1/(8 tau)` with the
    /// panel-pair parity arranged so the kink is an even node).
    pub fn default_for(pc: &PriorConstruction) -> Self {
        let hi = 400.0_f64.max(5_000.0 / pc.tau);
        let h = 1.0 / (8.0 * pc.tau);
        let mut m = (hi / h).ceil() as usize;
        if m % 2 == 1 {
            m += 1;
        }
        let half = m as f64 * h;
        Self::uniform(-half, half, 2 * m + 1, QuadratureRule::Simpson)
    }

    fn integrate(&self, values: &[f64]) -> f64 {
        let h = self.xs[1] - self.xs[0];
        match self.quadrature {
            QuadratureRule::Simpson => simpson_uniform(values, h),
            QuadratureRule::Trapezoid => crate::quad::trapezoid_uniform(values, h),
        }
    }
}

/// Outcome of the `p1` density checks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct P1Report {
    pub min_p1: f64,
    pub argmin_x: f64,
    pub integral_p1: f64,
    pub integral_delta: f64,
}

/// Scans `p1 = p0 + Delta` on the grid and integrates it, correcting
/// `int p1` by the analytic `p0` mass outside the grid.
pub fn verify_p1(pc: &PriorConstruction, grid: &mut DensityGrid) -> P1Report {
    let deltas: Vec<f64> = grid.xs.par_iter().map(|&x| delta_closed(x, pc)).collect();
    grid.values =
        grid.xs.iter().zip(&deltas).map(|(&x, &d)| p0_density(x, pc.tau) + d).collect();
    let (mut min_p1, mut argmin_x) = (f64::INFINITY, f64::NAN);
    for (&x, &v) in grid.xs.iter().zip(&grid.values) {
        if v < min_p1 {
            min_p1 = v;
            argmin_x = x;
        }
    }
    let integral_delta = grid.integrate(&deltas);
    let lo = grid.xs[0];
    let hi = *grid.xs.last().unwrap();
    let p0_tail = p0_cdf(lo, pc.tau) + (1.0 - p0_cdf(hi, pc.tau));
    let integral_p1 = grid.integrate(&grid.values) + p0_tail;
    P1Report { min_p1, argmin_x, integral_p1, integral_delta }
}

/// Filon samples of `g(t) e^{-t^2/2}` on the ramp and taper pieces; the
/// smoothing factor is the Gaussian CF, so the sine transform of these
/// samples is `(Delta * phi)(x)` exactly in the limit of fine panels.
#[derive(Debug, Clone)]
struct SmoothedDelta {
    ramp: Vec<f64>,
    taper: Vec<f64>,
    h_ramp: f64,
    h_taper: f64,
    tau: f64,
}

impl SmoothedDelta {
    fn build(pc: &PriorConstruction) -> Self {
        let m = 256usize;
        let h_ramp = pc.tau / (2 * m) as f64;
        let smooth = |t: f64| pc.g(t) * (-0.5 * t * t).exp();
        let ramp = (0..=2 * m).map(|i| smooth(i as f64 * h_ramp)).collect();
        let h_taper = pc.tau / (2 * m) as f64;
        let taper = (0..=2 * m).map(|i| smooth(pc.tau + i as f64 * h_taper)).collect();
        Self { ramp, taper, h_ramp, h_taper, tau: pc.tau }
    }

    /// `(Delta * phi)(x)`.
    fn eval(&self, x: f64) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        let ramp = filon_sin(&self.ramp, 0.0, self.h_ramp, x);
        let taper = filon_sin(&self.taper, self.tau, self.h_taper, x);
        -(ramp + taper) / PI
    }
}

/// One side of the CF-matching mixture pair, with enough structure to
/// evaluate, integrate, transform, and sample it.
#[derive(Debug, Clone)]
pub struct MixtureDensity {
    pub pc: PriorConstruction,
    /// False for `f0` (perturbation-free branch), true for `f1`.
    pub perturbed: bool,
    /// Means of the two Gaussian point-mass components with weights
    /// `(1 - eps)` and `2 eps^2`.
    pub gauss_means: (f64, f64),
    /// Shift of the `p_i * phi` component with weight `eps (1 - 2 eps)`.
    pub p_shift: f64,
    smoothed: Arc<SmoothedDelta>,
}

impl MixtureDensity {
    fn weights(&self) -> (f64, f64, f64) {
        let eps = self.pc.eps;
        (1.0 - eps, 2.0 * eps * eps, eps * (1.0 - 2.0 * eps))
    }

    /// `(p0 * phi)(y)`: the box part in closed form via the Gaussian CDF,
    /// the power tail by adaptive quadrature over the 8-sigma window where
    /// the Gaussian factor lives.
    fn p0_conv_phi(&self, y: f64) -> f64 {
        let tau = self.pc.tau;
        let edge = 1.0 / tau;
        let box_part = tau / 4.0 * (norm_cdf(y + edge) - norm_cdf(y - edge));
        let mut tail = 0.0;
        let window = 8.0;
        // right tail region [edge, inf)
        let lo = edge.max(y - window);
        let hi = y + window;
        if hi > lo {
            tail += adaptive_simpson(&|u| phi(y - u) / (4.0 * tau * u * u), lo, hi, 1e-13)
                .unwrap_or(0.0);
        }
        // left tail region (-inf, -edge]
        let lo = y - window;
        let hi = (-edge).min(y + window);
        if hi > lo {
            tail += adaptive_simpson(&|u| phi(y - u) / (4.0 * tau * u * u), lo, hi, 1e-13)
                .unwrap_or(0.0);
        }
        box_part + tail
    }

    /// Density at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let (w0, w1, wp) = self.weights();
        let mut v = w0 * phi(x - self.gauss_means.0) + w1 * phi(x - self.gauss_means.1);
        if wp > 0.0 {
            let y = x - self.p_shift;
            let mut p = self.p0_conv_phi(y);
            if self.perturbed {
                p += self.smoothed.eval(y);
            }
            v += wp * p;
        }
        v
    }

    /// Difference `f1(x) - f0(x)` for a pair built by [`build_mixture_pair`]:
    /// the Gaussian point masses swap places and the `p`-component changes
    /// by `Delta * phi`. Evaluating the difference directly avoids
    /// cancellation in the tiny CF-matching checks.
    pub fn pair_difference(f0: &MixtureDensity, f1: &MixtureDensity, x: f64) -> f64 {
        let eps = f0.pc.eps;
        let swap = (1.0 - eps) - 2.0 * eps * eps;
        let gauss = swap * (phi(x - f1.gauss_means.0) - phi(x - f0.gauss_means.0));
        let wp = eps * (1.0 - 2.0 * eps);
        gauss + wp * f1.smoothed.eval(x - f1.p_shift)
    }

    /// CDF at `x`: Gaussian components in closed form, the `p`-component by
    /// conditioning on the `p_i` draw over the window where the Gaussian
    /// CDF is strictly between 0 and 1.
    pub fn cdf(&self, x: f64) -> f64 {
        let (w0, w1, wp) = self.weights();
        let mut c = w0 * norm_cdf(x - self.gauss_means.0) + w1 * norm_cdf(x - self.gauss_means.1);
        if wp > 0.0 {
            let y = x - self.p_shift;
            // P(U + Z <= y) = E[Phi(y - U)]; Phi saturates beyond 8
            let pc = self.pc;
            let perturbed = self.perturbed;
            let mass_below = |v: f64| {
                let mut m = p0_cdf(v, pc.tau);
                if perturbed {
                    // int_{-inf}^{v} Delta: integrate the closed form from
                    // the left grid edge; the envelope tail is O(1/(tau^2 v^2))
                    m += integral_delta_below(&pc, v);
                }
                m
            };
            let integrand = |u: f64| {
                let p1u = p0_density(u, pc.tau)
                    + if perturbed { delta_closed(u, &pc) } else { 0.0 };
                norm_cdf(y - u) * p1u
            };
            let window =
                adaptive_simpson(&integrand, y - 8.0, y + 8.0, 1e-11).unwrap_or(0.0);
            c += wp * (mass_below(y - 8.0) + window);
        }
        c.clamp(0.0, 1.0)
    }
}

/// `int_{-inf}^{v} Delta(x) dx` by Simpson on an oscillation-resolving grid
/// from a far-left cutoff (where the by-parts tail is negligible).
fn integral_delta_below(pc: &PriorConstruction, v: f64) -> f64 {
    let cutoff = -4000.0 / pc.tau;
    if v <= cutoff {
        return 0.0;
    }
    let h_target = PI / (16.0 * pc.tau);
    let mut points = ((v - cutoff) / h_target).ceil() as usize + 1;
    if points % 2 == 0 {
        points += 1;
    }
    let points = points.max(5);
    let h = (v - cutoff) / (points - 1) as f64;
    let values: Vec<f64> =
        (0..points).map(|i| delta_closed(cutoff + i as f64 * h, pc)).collect();
    simpson_uniform(&values, h)
}

/// The mixture pair of the CF-matching construction:
/// `f0 = ((1-eps) d_0 + eps (g0 * d_mu)) * phi` and
/// `f1 = ((1-eps) d_{2mu} + eps (g1 * d_mu)) * phi`, whose Fourier
/// transforms coincide on `[-tau, tau]`.
pub fn build_mixture_pair(pc: &PriorConstruction) -> (MixtureDensity, MixtureDensity) {
    let smoothed = Arc::new(SmoothedDelta::build(pc));
    let f0 = MixtureDensity {
        pc: *pc,
        perturbed: false,
        gauss_means: (0.0, 2.0 * pc.mu),
        p_shift: pc.mu,
        smoothed: Arc::clone(&smoothed),
    };
    let f1 = MixtureDensity {
        pc: *pc,
        perturbed: true,
        gauss_means: (2.0 * pc.mu, 0.0),
        p_shift: pc.mu,
        smoothed,
    };
    (f0, f1)
}

/// Max of `|f1_hat(t) - f0_hat(t)|` over a `t_points`-grid on
/// `[-0.99 tau, 0.99 tau]`, with the transform of the difference taken by
/// trapezoid on a wide oscillation-safe x-grid.
pub fn cf_difference_max(
    f0: &MixtureDensity,
    f1: &MixtureDensity,
    t_points: usize,
) -> f64 {
    let pc = &f0.pc;
    let x_max = 6000.0;
    let h = 0.2;
    let m = (x_max / h) as usize;
    let diffs: Vec<f64> = (-(m as isize)..=m as isize)
        .into_par_iter()
        .map(|i| MixtureDensity::pair_difference(f0, f1, i as f64 * h))
        .collect();
    let t_grid: Vec<f64> = (0..t_points)
        .map(|j| -0.99 * pc.tau + 1.98 * pc.tau * j as f64 / (t_points - 1) as f64)
        .collect();
    t_grid
        .par_iter()
        .map(|&t| {
            let (mut re, mut im) = (0.0, 0.0);
            for (i, &d) in diffs.iter().enumerate() {
                let x = (i as isize - m as isize) as f64 * h;
                let (s, c) = (t * x).sin_cos();
                re += d * c;
                im -= d * s;
            }
            (re * re + im * im).sqrt() * h
        })
        .reduce(|| 0.0, f64::max)
}

/// chi-square divergence `int (f1 - f0)^2 / f0` by Simpson, plus an
/// envelope bound on the truncated tail.
pub fn chi2_quadrature(f0: &MixtureDensity, f1: &MixtureDensity) -> f64 {
    let pc = &f0.pc;
    let x_max = 100.0;
    let points = 12_801usize;
    let h = 2.0 * x_max / (points - 1) as f64;
    let values: Vec<f64> = (0..points)
        .into_par_iter()
        .map(|i| {
            let x = -x_max + i as f64 * h;
            let d = MixtureDensity::pair_difference(f0, f1, x);
            let base = f0.eval(x);
            if base <= 0.0 {
                0.0
            } else {
                d * d / base
            }
        })
        .collect();
    let core = simpson_uniform(&values, h);
    // tail: |f1-f0| <= eps(1-2eps) K/(tau x^2) against f0 >= eps(1-2eps) p0
    let wp = pc.eps * (1.0 - 2.0 * pc.eps);
    let k_env = 2.0 * pc.c0;
    let tail = 8.0 * wp * k_env * k_env / (pc.tau * x_max);
    core + tail
}

/// Draws one value from the mixing measure `g0 = 2 eps d_mu + (1-2eps) p0`
/// or `g1 = 2 eps d_{-mu} + (1-2eps) p1`. `p1` uses rejection against the
/// envelope `2 p0`, which dominates it under the density contract.
pub fn sample_g(pc: &PriorConstruction, perturbed: bool, r: &mut ChaCha8Rng) -> Result<f64> {
    let u: f64 = r.random();
    if u < 2.0 * pc.eps {
        return Ok(if perturbed { -pc.mu } else { pc.mu });
    }
    if !perturbed {
        return Ok(p0_quantile(r.random(), pc.tau));
    }
    for _ in 0..10_000 {
        let y = p0_quantile(r.random(), pc.tau);
        let bound = 2.0 * p0_density(y, pc.tau);
        let accept: f64 = r.random();
        let p1 = p0_density(y, pc.tau) + delta_closed(y, pc);
        if accept * bound <= p1 {
            return Ok(y);
        }
    }
    Err(Error::RejectionFloor { attempts: 10_000 })
}

/// i.i.d. draws from a mixture density via its component decomposition.
pub fn sample_mixture(f: &MixtureDensity, n: usize, seed: u64) -> Result<Sample> {
    let (w0, w1, _) = f.weights();
    let pc = f.pc;
    let mut r = rng::stream(seed, &[0x6d6978]);
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        let z: f64 = StandardNormal.sample(&mut r);
        let u: f64 = r.random();
        let center = if u < w0 {
            f.gauss_means.0
        } else if u < w0 + w1 {
            f.gauss_means.1
        } else {
            let y = if f.perturbed {
                // p1 via rejection against 2 p0
                let mut drawn = None;
                for _ in 0..10_000 {
                    let y = p0_quantile(r.random(), pc.tau);
                    let accept: f64 = r.random();
                    let p1 = p0_density(y, pc.tau) + delta_closed(y, &pc);
                    if accept * 2.0 * p0_density(y, pc.tau) <= p1 {
                        drawn = Some(y);
                        break;
                    }
                }
                drawn.ok_or(Error::RejectionFloor { attempts: 10_000 })?
            } else {
                p0_quantile(r.random(), pc.tau)
            };
            y + f.p_shift
        };
        values.push(center + z);
    }
    Sample::new(values)
}

/// Data from the two-block prior of the inconsistency regime. Arm 0 draws
/// `theta = C psi` with `gamma = -2 C psi` on a uniform size-k subset of
/// the first half; arm 1 mirrors it on the second half.
pub fn two_block_prior_sample(
    k: usize,
    n: usize,
    c: f64,
    arm: u8,
    seed: u64,
) -> Result<(Sample, NullParams)> {
    if n % 2 != 0 {
        return Err(Error::InvalidParameter(format!("two-block prior needs even n, got {n}")));
    }
    let nf = n as f64;
    let gap = nf - 2.0 * k as f64;
    // k in (n/2 - sqrt(n), n/2) means 0 < n - 2k < 2 sqrt(n)
    if !(gap > 0.0 && gap < 2.0 * nf.sqrt()) {
        return Err(Error::OutOfRegime { k, n });
    }
    if arm > 1 {
        return Err(Error::InvalidParameter(format!("arm must be 0 or 1, got {arm}")));
    }
    let psi = (nf / (gap * gap)).ln_1p().sqrt();
    let theta = if arm == 0 { c * psi } else { -c * psi };
    let shift = if arm == 0 { -2.0 * c * psi } else { 2.0 * c * psi };
    let mut r = rng::stream(seed, &[0x74776f, arm as u64]);
    let half = n / 2;
    let offset = if arm == 0 { 0 } else { half };
    let support = rand::seq::index::sample(&mut r, half, k);
    let mut gamma = vec![0.0; n];
    for idx in support.iter() {
        gamma[offset + idx] = shift;
    }
    let values: Vec<f64> = gamma
        .iter()
        .map(|&g| theta + g + <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut r))
        .collect();
    Ok((Sample::new(values)?, NullParams::new(theta, 1.0)?))
}

/// JSON verification record for one eps; the contract thresholds mirror
/// the construction's guarantees.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub eps: f64,
    pub n: usize,
    pub min_p1: f64,
    pub integral_p1: f64,
    pub integral_delta: f64,
    pub cf_match_max: f64,
    pub chi2_estimate: f64,
    pub failures: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs every check of the construction at one `(eps, n)`: density validity
/// of `p1`, CF matching on `[-0.99 tau, 0.99 tau]`, and the chi-square
/// budget `c/n`.
pub fn verify_construction(eps: f64, n: usize, hp: &Hyperparams) -> Result<VerificationReport> {
    let pc = PriorConstruction::new(eps, n, hp)?;
    let mut grid = DensityGrid::default_for(&pc);
    let p1 = verify_p1(&pc, &mut grid);
    let (f0, f1) = build_mixture_pair(&pc);
    let cf_match_max = if pc.eps < 0.5 { cf_difference_max(&f0, &f1, 256) } else { 0.0 };
    let chi2_estimate = if pc.eps < 0.5 { chi2_quadrature(&f0, &f1) } else { 0.0 };
    let mut failures = Vec::new();
    if p1.min_p1 < -1e-8 {
        failures.push(format!("min_p1 = {} < -1e-8", p1.min_p1));
    }
    if (p1.integral_p1 - 1.0).abs() > 1e-4 {
        failures.push(format!("integral_p1 = {} off 1 by more than 1e-4", p1.integral_p1));
    }
    if p1.integral_delta.abs() > 1e-5 {
        failures.push(format!("integral_delta = {} exceeds 1e-5", p1.integral_delta));
    }
    if cf_match_max > 1e-6 {
        failures.push(format!("cf_match_max = {cf_match_max} exceeds 1e-6"));
    }
    if chi2_estimate > 1.0 / n as f64 {
        failures.push(format!("chi2_estimate = {chi2_estimate} exceeds 1/n"));
    }
    Ok(VerificationReport {
        eps,
        n,
        min_p1: p1.min_p1,
        integral_p1: p1.integral_p1,
        integral_delta: p1.integral_delta,
        cf_match_max,
        chi2_estimate,
        failures,
    })
}
