//! Shared domain types: samples, null parameters, contamination patterns,
//! and the hyperparameter block holding every constant the theory leaves
//! symbolic.

use serde::{Deserialize, Serialize};

use crate::rng;
use crate::{Error, Result};

/// Ordered vector of real z-scores.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    /// Validates `n >= 2` and finiteness of every entry.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::SampleTooSmall { n: values.len(), min: 2 });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Sample shifted by a constant; used by shift-invariance checks.
    pub fn shifted(&self, c: f64) -> Self {
        Self { values: self.values.iter().map(|x| x + c).collect() }
    }
}

/// Location and variance of the null component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullParams {
    pub theta: f64,
    pub sigma2: f64,
}

impl NullParams {
    pub fn new(theta: f64, sigma2: f64) -> Result<Self> {
        if !(sigma2 > 0.0 && sigma2.is_finite() && theta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "null params need finite theta and sigma2 > 0, got ({theta}, {sigma2})"
            )));
        }
        Ok(Self { theta, sigma2 })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }
}

/// Rule producing a mean-shift vector with at most `k` nonzeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ContaminationKind {
    Zero,
    ConstantShift { value: f64 },
    /// All shifts equal to pi/omega, the worst case for a single-frequency
    /// variance estimator evaluated at `omega`.
    PiOverOmega { omega: f64 },
    /// Half the shifts at +value, half at -value.
    TwoSidedBlocks { value: f64 },
    /// Shifts drawn i.i.d. from the lower-bound mixing measure g0.
    PriorG0 { eps: f64 },
    /// Shifts drawn i.i.d. from the lower-bound mixing measure g1.
    PriorG1 { eps: f64 },
    Custom { gamma: Vec<f64> },
}

/// A realized contamination vector together with its sparsity budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContaminationSpec {
    pub k: usize,
    pub kind: ContaminationKind,
    pub gamma: Vec<f64>,
}

impl ContaminationSpec {
    /// Realizes the gamma vector for a sample of size `n`. Nonzero entries
    /// occupy the first `k` coordinates (the noise is exchangeable, so the
    /// placement carries no statistical content). Only the prior kinds
    /// consume randomness.
    pub fn realize(
        kind: ContaminationKind,
        k: usize,
        n: usize,
        hp: &Hyperparams,
        seed: u64,
    ) -> Result<Self> {
        if k >= n {
            return Err(Error::InvalidParameter(format!(
                "contamination count k = {k} must be < n = {n}"
            )));
        }
        let mut gamma = vec![0.0; n];
        match &kind {
            ContaminationKind::Zero => {}
            ContaminationKind::ConstantShift { value } => {
                gamma[..k].fill(*value);
            }
            ContaminationKind::PiOverOmega { omega } => {
                if *omega == 0.0 {
                    return Err(Error::InvalidParameter("pi-over-omega needs omega != 0".into()));
                }
                gamma[..k].fill(std::f64::consts::PI / omega);
            }
            ContaminationKind::TwoSidedBlocks { value } => {
                let half = k.div_ceil(2);
                gamma[..half].fill(*value);
                gamma[half..k].fill(-*value);
            }
            ContaminationKind::PriorG0 { eps } | ContaminationKind::PriorG1 { eps } => {
                let pc = crate::lowerbound::PriorConstruction::new(*eps, n, hp)?;
                let mut r = rng::stream(seed, &[0x67616d, k as u64]);
                let use_g1 = matches!(kind, ContaminationKind::PriorG1 { .. });
                for g in gamma.iter_mut().take(k) {
                    *g = crate::lowerbound::sample_g(&pc, use_g1, &mut r)?;
                }
            }
            ContaminationKind::Custom { gamma: given } => {
                if given.len() != n {
                    return Err(Error::InvalidParameter(format!(
                        "custom gamma has length {}, expected n = {n}",
                        given.len()
                    )));
                }
                gamma.copy_from_slice(given);
            }
        }
        let spec = Self { k, kind, gamma };
        spec.validate()?;
        Ok(spec)
    }

    pub fn nonzeros(&self) -> usize {
        self.gamma.iter().filter(|g| **g != 0.0).count()
    }

    pub fn validate(&self) -> Result<()> {
        if self.nonzeros() > self.k {
            return Err(Error::InvalidParameter(format!(
                "gamma has {} nonzeros, exceeding the budget k = {}",
                self.nonzeros(),
                self.k
            )));
        }
        Ok(())
    }
}

/// Every constant the theory leaves symbolic, with defaults calibrated so
/// the acceptance suite passes with margin. All fields are overridable
/// (`--set key=value` on the CLI).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Hyperparams {
    /// tau constant `c` in `tau = 1 v c sqrt(log(1 + k^2 (n-2k)^2 / n^3))`.
    pub c_tau: f64,
    /// Variance window constant: `a = c_a sigma_tilde^-1 sqrt(1 v log(e k^2/n))`.
    /// Must keep `b = 100 a` inside the band where `e^{-sigma^2 b^2/2}` stays
    /// above the ECF noise floor `~n^{-1/2}`.
    pub c_a: f64,
    /// Pilot subset count exponent: `m = ceil(n^c1_pilot)`, capped at `m_cap`.
    pub c1_pilot: f64,
    /// Pilot subset size factor: `ell = max(3, ceil(c2_pilot ln n))`.
    pub c2_pilot: f64,
    /// Cap on the number of pilot subsets.
    pub m_cap: usize,
    /// Width constant R of the variance interval `[sigma_-^2, sigma_+^2]`.
    pub r_sigma: f64,
    /// Amplitude of the lower-bound perturbation density. The density
    /// contract (p1 >= 0) holds for c0 <= 1/24; larger values are accepted
    /// and flagged by the verification report instead.
    pub c0: f64,
    /// tau constant `B_c` of the CF-matching prior pair.
    pub bc: f64,
    /// Confidence constant inside the mode bandwidth logarithm.
    pub l_delta: f64,
    /// Leading constant of the mode bandwidth.
    pub mode_c1: f64,
    /// mu-grid half-width in units of `sigma sqrt(log n)`.
    pub mu_grid_halfwidth_mult: f64,
    /// mu-grid spacing in units of `sigma eps(k, n)`.
    pub mu_grid_step_mult: f64,
    /// omega-grid spacing in units of `1/sqrt(n log n)`.
    pub omega_grid_step_mult: f64,
    /// Points of the candidate-variance grid on `[sigma_-^2, sigma_+^2]`.
    pub v_grid_points: usize,
    /// Points of the variance frequency window `[a, 100a]`.
    pub var_grid_points: usize,
    /// Lepski interval half-width constant for location, in units of
    /// `sigma_tilde eps(k, n)`.
    pub lepski_c_loc: f64,
    /// Lepski interval half-width constant for variance, in units of
    /// `sigma_tilde^2 eps_var(k, n)`.
    pub lepski_c_var: f64,
    /// Top of the Lepski grid: `floor(n/2 - lepski_c_delta sqrt(n))`.
    pub lepski_c_delta: f64,
    /// Geometric thinning ratio of the Lepski k-grid.
    pub lepski_ratio: f64,
    /// Proportionality constant in the general-noise tau rule
    /// `1/psi_F(tau) ~ k (n-2k) / n^{3/2}`.
    pub general_tau_scale: f64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            c_tau: 0.5,
            c_a: 0.05,
            c1_pilot: 1.5,
            c2_pilot: 3.0,
            m_cap: 200_000,
            r_sigma: 4.0,
            c0: 1.0 / 24.0,
            bc: 3.0,
            l_delta: 1.0,
            mode_c1: 1.0,
            mu_grid_halfwidth_mult: 3.0,
            mu_grid_step_mult: 0.25,
            omega_grid_step_mult: 1.0,
            v_grid_points: 33,
            var_grid_points: 512,
            lepski_c_loc: 8.0,
            lepski_c_var: 6.0,
            lepski_c_delta: 2.0,
            lepski_ratio: 1.25,
            general_tau_scale: 1.0,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        let positives = [
            ("c_tau", self.c_tau),
            ("c_a", self.c_a),
            ("c1_pilot", self.c1_pilot),
            ("c2_pilot", self.c2_pilot),
            ("r_sigma", self.r_sigma),
            ("c0", self.c0),
            ("bc", self.bc),
            ("l_delta", self.l_delta),
            ("mode_c1", self.mode_c1),
            ("mu_grid_halfwidth_mult", self.mu_grid_halfwidth_mult),
            ("mu_grid_step_mult", self.mu_grid_step_mult),
            ("omega_grid_step_mult", self.omega_grid_step_mult),
            ("lepski_c_loc", self.lepski_c_loc),
            ("lepski_c_var", self.lepski_c_var),
            ("lepski_c_delta", self.lepski_c_delta),
            ("general_tau_scale", self.general_tau_scale),
        ];
        for (name, v) in positives {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if self.lepski_ratio <= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "lepski_ratio must exceed 1, got {}",
                self.lepski_ratio
            )));
        }
        if self.v_grid_points < 17 {
            return Err(Error::InvalidParameter(format!(
                "v_grid_points must be >= 17, got {}",
                self.v_grid_points
            )));
        }
        if self.var_grid_points < 512 {
            return Err(Error::InvalidParameter(format!(
                "var_grid_points must be >= 512, got {}",
                self.var_grid_points
            )));
        }
        if self.m_cap < 1 {
            return Err(Error::InvalidParameter("m_cap must be >= 1".into()));
        }
        Ok(())
    }

    /// Applies a `key=value` override; used by the CLI `--set` flag.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let fval = || {
            value
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("cannot parse `{value}` for {key}")))
        };
        let uval = || {
            value
                .parse::<usize>()
                .map_err(|_| Error::InvalidParameter(format!("cannot parse `{value}` for {key}")))
        };
        match key {
            "c_tau" => self.c_tau = fval()?,
            "c_a" => self.c_a = fval()?,
            "c1_pilot" => self.c1_pilot = fval()?,
            "c2_pilot" => self.c2_pilot = fval()?,
            "m_cap" => self.m_cap = uval()?,
            "r_sigma" => self.r_sigma = fval()?,
            "c0" => self.c0 = fval()?,
            "bc" => self.bc = fval()?,
            "l_delta" => self.l_delta = fval()?,
            "mode_c1" => self.mode_c1 = fval()?,
            "mu_grid_halfwidth_mult" => self.mu_grid_halfwidth_mult = fval()?,
            "mu_grid_step_mult" => self.mu_grid_step_mult = fval()?,
            "omega_grid_step_mult" => self.omega_grid_step_mult = fval()?,
            "v_grid_points" => self.v_grid_points = uval()?,
            "var_grid_points" => self.var_grid_points = uval()?,
            "lepski_c_loc" => self.lepski_c_loc = fval()?,
            "lepski_c_var" => self.lepski_c_var = fval()?,
            "lepski_c_delta" => self.lepski_c_delta = fval()?,
            "lepski_ratio" => self.lepski_ratio = fval()?,
            "general_tau_scale" => self.general_tau_scale = fval()?,
            other => {
                return Err(Error::InvalidParameter(format!("unknown hyperparameter `{other}`")))
            }
        }
        self.validate()
    }
}
