//! Cai–Jin characteristic-function functionals, the comparison estimators.
//! On the exact null characteristic function they return the parameters
//! identically; on the empirical characteristic function they need decay
//! assumptions on the outliers that this crate's main estimators avoid.

use num_complex::Complex64;

use crate::ecf::{ecf_derivative, ecf_eval};
use crate::types::Sample;
use crate::{Error, Result};

/// Evaluation frequency and central-difference step.
#[derive(Debug, Clone, Copy)]
pub struct CaiJinConfig {
    pub omega_star: f64,
    pub fd_step: f64,
}

impl Default for CaiJinConfig {
    fn default() -> Self {
        Self { omega_star: 1.0, fd_step: 1e-4 }
    }
}

impl CaiJinConfig {
    fn validate(&self) -> Result<()> {
        if self.omega_star == 0.0 || !(self.fd_step > 0.0) {
            return Err(Error::InvalidParameter(
                "caijin needs omega_star != 0 and fd_step > 0".into(),
            ));
        }
        // d|xi|/dt / (t |xi|) divides by t: keep the frequency away from 0
        if self.omega_star.abs() < 10.0 * self.fd_step {
            return Err(Error::InvalidParameter(format!(
                "omega_star {} too close to 0 for fd_step {}",
                self.omega_star, self.fd_step
            )));
        }
        Ok(())
    }
}

/// `mu(omega; xi) = Im(conj(xi) xi') / |xi|^2`. Equals the location for the
/// exact null characteristic function at every `omega != 0`.
pub fn mu_functional(xi: Complex64, dxi: Complex64) -> f64 {
    (xi.conj() * dxi).im / xi.norm_sqr()
}

/// `v(omega; xi) = -(d/dt |xi|) / (omega |xi|) = -Re(conj(xi) xi') / (omega |xi|^2)`.
/// Equals the variance for the exact null characteristic function.
pub fn v_functional(xi: Complex64, dxi: Complex64, omega: f64) -> f64 {
    -(xi.conj() * dxi).re / (omega * xi.norm_sqr())
}

fn guarded_ecf(sample: &Sample, omega: f64) -> Result<Complex64> {
    let xi = ecf_eval(sample, omega);
    let guard = 1.0 / sample.n() as f64;
    if xi.norm() <= guard {
        return Err(Error::EcfBelowGuard { omega, modulus: xi.norm(), guard });
    }
    Ok(xi)
}

/// Location functional on the empirical characteristic function with a
/// central-difference derivative.
pub fn caijin_location(sample: &Sample, cfg: &CaiJinConfig) -> Result<f64> {
    cfg.validate()?;
    let xi = guarded_ecf(sample, cfg.omega_star)?;
    let dxi = ecf_derivative(sample, cfg.omega_star, cfg.fd_step);
    Ok(mu_functional(xi, dxi))
}

/// Variance functional on the empirical characteristic function modulus
/// with central differences.
pub fn caijin_variance(sample: &Sample, cfg: &CaiJinConfig) -> Result<f64> {
    cfg.validate()?;
    let xi = guarded_ecf(sample, cfg.omega_star)?;
    let plus = ecf_eval(sample, cfg.omega_star + cfg.fd_step).norm();
    let minus = ecf_eval(sample, cfg.omega_star - cfg.fd_step).norm();
    let dmod = (plus - minus) / (2.0 * cfg.fd_step);
    Ok(-dmod / (cfg.omega_star * xi.norm()))
}
