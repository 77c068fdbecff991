//! Python bindings for the empirical-null estimators: minimax rates, the
//! Fourier min-sup-inf location estimators, the frequency-window variance
//! estimator, the kernel mode estimator, Lepski adaptation, and the
//! lower-bound verification routines.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use null_est::adaptation;
use null_est::baselines::{self, CaiJinConfig};
use null_est::location;
use null_est::lowerbound;
use null_est::mode;
use null_est::rates;
use null_est::sim;
use null_est::types::{ContaminationKind, ContaminationSpec, NullParams, Sample};
use null_est::variance;

fn err(e: null_est::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn sample(values: Vec<f64>) -> PyResult<Sample> {
    Sample::new(values).map_err(err)
}

/// Hyperparameter block with the library defaults; individual entries are
/// overridable by name, mirroring the CLI `--set` flag.
#[pyclass(name = "Hyperparams", from_py_object)]
#[derive(Clone, Default)]
struct PyHyperparams {
    inner: null_est::Hyperparams,
}

#[pymethods]
impl PyHyperparams {
    #[new]
    fn new() -> Self {
        Self::default()
    }

    fn set(&mut self, key: &str, value: &str) -> PyResult<()> {
        self.inner.set(key, value).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

fn hp_or_default(hp: Option<PyHyperparams>) -> null_est::Hyperparams {
    hp.map(|h| h.inner).unwrap_or_default()
}

#[pyclass(name = "LocationEstimate")]
struct PyLocationEstimate {
    #[pyo3(get)]
    theta_hat: f64,
    #[pyo3(get)]
    v_hat: Option<f64>,
    #[pyo3(get)]
    objective_value: f64,
    #[pyo3(get)]
    tau: f64,
    #[pyo3(get)]
    mu_grid_step: f64,
}

impl From<location::LocationEstimate> for PyLocationEstimate {
    fn from(est: location::LocationEstimate) -> Self {
        Self {
            theta_hat: est.theta_hat,
            v_hat: est.v_hat,
            objective_value: est.objective_value,
            tau: est.tau_used,
            mu_grid_step: est.mu_grid_used.step,
        }
    }
}

#[pyclass(name = "VarianceEstimate")]
struct PyVarianceEstimate {
    #[pyo3(get)]
    sigma2_hat: f64,
    #[pyo3(get)]
    a: f64,
    #[pyo3(get)]
    b: f64,
    #[pyo3(get)]
    omega_argmin: f64,
}

#[pyclass(name = "AdaptiveEstimate")]
struct PyAdaptiveEstimate {
    #[pyo3(get)]
    theta_hat: f64,
    #[pyo3(get)]
    sigma2_hat: f64,
    #[pyo3(get)]
    pilot_sigma2: f64,
    #[pyo3(get)]
    k_prime_location: Option<usize>,
    #[pyo3(get)]
    k_prime_variance: Option<usize>,
    #[pyo3(get)]
    fallback_used: bool,
}

/// Squared minimax location rate at (k, n) with noise variance `sigma2`.
#[pyfunction]
#[pyo3(signature = (k, n, sigma2 = 1.0))]
fn rate_location_sq(k: usize, n: usize, sigma2: f64) -> PyResult<f64> {
    rates::rate_location_sq(k, n, sigma2).map_err(err)
}

/// Squared minimax rate of the relative variance error.
#[pyfunction]
fn rate_variance(k: usize, n: usize) -> PyResult<f64> {
    rates::rate_variance(k, n).map_err(err)
}

/// Minimax rate for estimating the null in total variation, capped at 1.
#[pyfunction]
fn rate_tv(k: usize, n: usize) -> PyResult<f64> {
    rates::rate_tv(k, n).map_err(err)
}

/// Squared minimax location rate in Huber's contamination model.
#[pyfunction]
fn huber_rate(k: usize, n: usize) -> PyResult<f64> {
    rates::huber_rate(k, n).map_err(err)
}

/// Lower bound on the Huber-model modulus of continuity at level eps.
#[pyfunction]
fn huber_modulus(eps: f64) -> PyResult<f64> {
    rates::huber_modulus(eps).map_err(err)
}

/// Two-Gaussian total-variation surrogate between N(t1, s1) and N(t2, s2).
#[pyfunction]
fn tv_gaussian_surrogate(t1: f64, s1: f64, t2: f64, s2: f64) -> PyResult<f64> {
    let p = NullParams::new(t1, s1).map_err(err)?;
    let q = NullParams::new(t2, s2).map_err(err)?;
    Ok(rates::tv_gaussian_surrogate(&p, &q))
}

/// Empirical characteristic function at `omega`, as (re, im).
#[pyfunction]
fn ecf_eval(values: Vec<f64>, omega: f64) -> PyResult<(f64, f64)> {
    let s = sample(values)?;
    let v = null_est::ecf::ecf_eval(&s, omega);
    Ok((v.re, v.im))
}

/// Modulus of the empirical characteristic function at `omega`.
#[pyfunction]
fn ecf_norm(values: Vec<f64>, omega: f64) -> PyResult<f64> {
    Ok(null_est::ecf::ecf_norm(&sample(values)?, omega))
}

/// Closed-form disk fit: returns (residual, zeta_re, zeta_im, saturated).
#[pyfunction]
fn inner_disk_fit(a_re: f64, a_im: f64, k: usize, n: usize) -> (f64, f64, f64, bool) {
    let fit = location::inner_disk_fit(num_complex_from(a_re, a_im), k, n);
    (fit.residual, fit.zeta_opt.re, fit.zeta_opt.im, fit.saturated)
}

fn num_complex_from(re: f64, im: f64) -> num_complex::Complex64 {
    num_complex::Complex64::new(re, im)
}

/// Known-variance min-sup-inf location estimator.
#[pyfunction]
#[pyo3(signature = (values, k, sigma2, hp = None))]
fn estimate_location_known_var(
    values: Vec<f64>,
    k: usize,
    sigma2: f64,
    hp: Option<PyHyperparams>,
) -> PyResult<PyLocationEstimate> {
    location::estimate_location_known_var(&sample(values)?, k, sigma2, &hp_or_default(hp))
        .map(Into::into)
        .map_err(err)
}

/// Unknown-variance estimator: pilot, variance window, then the joint
/// (location, whitening-variance) grid search.
#[pyfunction]
#[pyo3(signature = (values, k, seed = 0, hp = None))]
fn estimate_location_unknown_var(
    values: Vec<f64>,
    k: usize,
    seed: u64,
    hp: Option<PyHyperparams>,
) -> PyResult<PyLocationEstimate> {
    location::estimate_location_unknown_var(&sample(values)?, k, &hp_or_default(hp), seed)
        .map(Into::into)
        .map_err(err)
}

/// Frequency-window variance estimator.
#[pyfunction]
#[pyo3(signature = (values, k, seed = 0, hp = None))]
fn estimate_variance(
    values: Vec<f64>,
    k: usize,
    seed: u64,
    hp: Option<PyHyperparams>,
) -> PyResult<PyVarianceEstimate> {
    let est =
        variance::estimate_variance(&sample(values)?, k, &hp_or_default(hp), seed).map_err(err)?;
    Ok(PyVarianceEstimate {
        sigma2_hat: est.sigma2_hat,
        a: est.a_used,
        b: est.b_used,
        omega_argmin: est.omega_argmin,
    })
}

/// Random-subset pilot variance: min over subsets of the subset variance.
#[pyfunction]
#[pyo3(signature = (values, seed = 0, hp = None))]
fn pilot_variance(values: Vec<f64>, seed: u64, hp: Option<PyHyperparams>) -> PyResult<f64> {
    let s = sample(values)?;
    let cfg = variance::PilotConfig::from_defaults(s.n(), &hp_or_default(hp), seed);
    variance::pilot_variance(&s, &cfg).map_err(err)
}

/// Single-frequency variance comparator at `omega`.
#[pyfunction]
fn single_frequency_variance(values: Vec<f64>, omega: f64) -> PyResult<f64> {
    variance::single_frequency_variance(&sample(values)?, omega).map_err(err)
}

/// Grid maximum of the mean cosine over [alpha, 100 alpha].
#[pyfunction]
#[pyo3(signature = (gammas, alpha, grid_points = 10_000))]
fn cosine_supremum(gammas: Vec<f64>, alpha: f64, grid_points: usize) -> f64 {
    variance::cosine_supremum(&gammas, alpha, grid_points)
}

/// Box-kernel mode estimate: returns (theta_hat, max_count).
#[pyfunction]
fn kernel_mode(values: Vec<f64>, h: f64) -> PyResult<(f64, usize)> {
    let est = mode::kernel_mode(&sample(values)?, h).map_err(err)?;
    Ok((est.theta_hat, est.max_count))
}

/// Widening bandwidth of the mode estimator.
#[pyfunction]
#[pyo3(signature = (k, n, hp = None))]
fn mode_bandwidth(k: usize, n: usize, hp: Option<PyHyperparams>) -> PyResult<f64> {
    mode::mode_bandwidth(k, n, &hp_or_default(hp)).map_err(err)
}

/// Lower sample median (order statistic ceil(n/2)).
#[pyfunction]
fn sample_median(values: Vec<f64>) -> PyResult<f64> {
    Ok(mode::sample_median(&sample(values)?))
}

/// Lepski-adaptive estimate of both null parameters, no knowledge of k.
#[pyfunction]
#[pyo3(signature = (values, seed = 0, hp = None))]
fn adaptive_null_estimate(
    values: Vec<f64>,
    seed: u64,
    hp: Option<PyHyperparams>,
) -> PyResult<PyAdaptiveEstimate> {
    let est = adaptation::adaptive_null_estimate(&sample(values)?, &hp_or_default(hp), seed)
        .map_err(err)?;
    Ok(PyAdaptiveEstimate {
        theta_hat: est.params.theta,
        sigma2_hat: est.params.sigma2,
        pilot_sigma2: est.pilot_sigma2,
        k_prime_location: est.location.k_prime,
        k_prime_variance: est.variance.k_prime,
        fallback_used: est.location.fallback_used || est.variance.fallback_used,
    })
}

/// Cai–Jin location functional on the empirical characteristic function.
#[pyfunction]
#[pyo3(signature = (values, omega_star = 1.0, fd_step = 1e-4))]
fn caijin_location(values: Vec<f64>, omega_star: f64, fd_step: f64) -> PyResult<f64> {
    baselines::caijin_location(&sample(values)?, &CaiJinConfig { omega_star, fd_step })
        .map_err(err)
}

/// Cai–Jin variance functional on the empirical characteristic function.
#[pyfunction]
#[pyo3(signature = (values, omega_star = 1.0, fd_step = 1e-4))]
fn caijin_variance(values: Vec<f64>, omega_star: f64, fd_step: f64) -> PyResult<f64> {
    baselines::caijin_variance(&sample(values)?, &CaiJinConfig { omega_star, fd_step })
        .map_err(err)
}

fn kind_from(name: &str, value: f64) -> PyResult<ContaminationKind> {
    Ok(match name {
        "zero" => ContaminationKind::Zero,
        "constant-shift" => ContaminationKind::ConstantShift { value },
        "pi-over-omega" => ContaminationKind::PiOverOmega { omega: value },
        "two-sided-blocks" => ContaminationKind::TwoSidedBlocks { value },
        "prior-g0" => ContaminationKind::PriorG0 { eps: value },
        "prior-g1" => ContaminationKind::PriorG1 { eps: value },
        other => {
            return Err(PyValueError::new_err(format!("unknown contamination kind `{other}`")))
        }
    })
}

/// Data from the mean-shift model: theta + gamma_j + sigma Z_j with k
/// contaminated coordinates of the named kind.
#[pyfunction]
#[pyo3(signature = (n, k, theta = 0.0, sigma2 = 1.0, gamma_kind = "constant-shift", gamma_value = 10.0, seed = 0, hp = None))]
#[allow(clippy::too_many_arguments)]
fn generate_frequentist(
    n: usize,
    k: usize,
    theta: f64,
    sigma2: f64,
    gamma_kind: &str,
    gamma_value: f64,
    seed: u64,
    hp: Option<PyHyperparams>,
) -> PyResult<Vec<f64>> {
    let h = hp_or_default(hp);
    let truth = NullParams::new(theta, sigma2).map_err(err)?;
    let spec = ContaminationSpec::realize(kind_from(gamma_kind, gamma_value)?, k, n, &h, seed)
        .map_err(err)?;
    let s = sim::generate_frequentist(&truth, &spec, seed).map_err(err)?;
    Ok(s.values().to_vec())
}

/// Two-block prior draw for the inconsistency regime: (values, true theta).
#[pyfunction]
fn two_block_prior_sample(
    k: usize,
    n: usize,
    c: f64,
    arm: u8,
    seed: u64,
) -> PyResult<(Vec<f64>, f64)> {
    let (s, truth) = lowerbound::two_block_prior_sample(k, n, c, arm, seed).map_err(err)?;
    Ok((s.values().to_vec(), truth.theta))
}

/// Numerical verification of the CF-matching prior pair at one (eps, n);
/// returns a dict matching the CLI JSON report.
#[pyfunction]
#[pyo3(signature = (eps, n, hp = None))]
fn verify_lowerbound<'py>(
    py: Python<'py>,
    eps: f64,
    n: usize,
    hp: Option<PyHyperparams>,
) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
    let report = lowerbound::verify_construction(eps, n, &hp_or_default(hp)).map_err(err)?;
    let dict = pyo3::types::PyDict::new(py);
    dict.set_item("eps", report.eps)?;
    dict.set_item("n", report.n)?;
    dict.set_item("min_p1", report.min_p1)?;
    dict.set_item("integral_p1", report.integral_p1)?;
    dict.set_item("integral_delta", report.integral_delta)?;
    dict.set_item("cf_match_max", report.cf_match_max)?;
    dict.set_item("chi2_estimate", report.chi2_estimate)?;
    dict.set_item("passed", report.passed())?;
    dict.set_item("failures", report.failures.clone())?;
    Ok(dict)
}

#[pymodule]
fn null_est_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHyperparams>()?;
    m.add_class::<PyLocationEstimate>()?;
    m.add_class::<PyVarianceEstimate>()?;
    m.add_class::<PyAdaptiveEstimate>()?;
    m.add_function(wrap_pyfunction!(rate_location_sq, m)?)?;
    m.add_function(wrap_pyfunction!(rate_variance, m)?)?;
    m.add_function(wrap_pyfunction!(rate_tv, m)?)?;
    m.add_function(wrap_pyfunction!(huber_rate, m)?)?;
    m.add_function(wrap_pyfunction!(huber_modulus, m)?)?;
    m.add_function(wrap_pyfunction!(tv_gaussian_surrogate, m)?)?;
    m.add_function(wrap_pyfunction!(ecf_eval, m)?)?;
    m.add_function(wrap_pyfunction!(ecf_norm, m)?)?;
    m.add_function(wrap_pyfunction!(inner_disk_fit, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_location_known_var, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_location_unknown_var, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_variance, m)?)?;
    m.add_function(wrap_pyfunction!(pilot_variance, m)?)?;
    m.add_function(wrap_pyfunction!(single_frequency_variance, m)?)?;
    m.add_function(wrap_pyfunction!(cosine_supremum, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_mode, m)?)?;
    m.add_function(wrap_pyfunction!(mode_bandwidth, m)?)?;
    m.add_function(wrap_pyfunction!(sample_median, m)?)?;
    m.add_function(wrap_pyfunction!(adaptive_null_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(caijin_location, m)?)?;
    m.add_function(wrap_pyfunction!(caijin_variance, m)?)?;
    m.add_function(wrap_pyfunction!(generate_frequentist, m)?)?;
    m.add_function(wrap_pyfunction!(two_block_prior_sample, m)?)?;
    m.add_function(wrap_pyfunction!(verify_lowerbound, m)?)?;
    Ok(())
}
