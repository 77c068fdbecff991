//! Data generation under the frequentist and Bayes models, and the Monte
//! Carlo sweep harness that checks estimator errors against the theoretical
//! rates. Trials draw from streams keyed by `(seed, n, k, trial)`, so sweep
//! output is byte-identical across worker counts.

use std::time::Instant;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adaptation::adaptive_null_estimate;
use crate::baselines::{caijin_location, caijin_variance, CaiJinConfig};
use crate::location::{estimate_location_known_var, estimate_location_unknown_var};
use crate::mode::{kernel_mode, mode_bandwidth, sample_median};
use crate::rates::{rate_location_sq, rate_variance, tv_gaussian_surrogate};
use crate::rng;
use crate::types::{ContaminationKind, ContaminationSpec, Hyperparams, NullParams, Sample};
use crate::variance::{
    estimate_variance, pilot_variance, single_frequency_omega, single_frequency_variance,
    PilotConfig,
};
use crate::{Error, Result};

/// `X_j = theta + gamma_j + sigma Z_j` with standard normal noise from the
/// seeded stream.
pub fn generate_frequentist(
    params: &NullParams,
    spec: &ContaminationSpec,
    seed: u64,
) -> Result<Sample> {
    spec.validate()?;
    let mut r = rng::stream(seed, &[0x66726571]);
    let sigma = params.sigma();
    let values: Vec<f64> = spec
        .gamma
        .iter()
        .map(|&g| {
            params.theta + g + sigma * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut r)
        })
        .collect();
    Sample::new(values)
}

/// Signal distribution of the Bayes (two-groups) model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum QSpec {
    PointMass { value: f64 },
    Uniform { lo: f64, hi: f64 },
    PriorG0 { eps: f64 },
    PriorG1 { eps: f64 },
}

/// `X_j ~ (1-eps) N(theta, sigma^2) + eps (Q * N(0, sigma^2))` by
/// per-coordinate Bernoulli mixing. Returns the sample together with the
/// realized contamination (whose `k` is the Binomial draw).
pub fn generate_bayes(
    eps: f64,
    params: &NullParams,
    q: &QSpec,
    n: usize,
    hp: &Hyperparams,
    seed: u64,
) -> Result<(Sample, ContaminationSpec)> {
    if !(0.0..=0.5).contains(&eps) {
        return Err(Error::InvalidParameter(format!("eps must be in [0, 1/2], got {eps}")));
    }
    let mut r = rng::stream(seed, &[0x62617965]);
    let mut gamma = vec![0.0; n];
    for g in gamma.iter_mut() {
        if r.random::<f64>() < eps {
            *g = match q {
                QSpec::PointMass { value } => *value,
                QSpec::Uniform { lo, hi } => r.random_range(*lo..*hi),
                QSpec::PriorG0 { eps: pe } => {
                    let pc = crate::lowerbound::PriorConstruction::new(*pe, n, hp)?;
                    crate::lowerbound::sample_g(&pc, false, &mut r)? + pc.mu
                }
                QSpec::PriorG1 { eps: pe } => {
                    let pc = crate::lowerbound::PriorConstruction::new(*pe, n, hp)?;
                    crate::lowerbound::sample_g(&pc, true, &mut r)? - pc.mu
                }
            };
            // a drawn value of exactly zero stays a null coordinate
        }
    }
    let k = gamma.iter().filter(|g| **g != 0.0).count();
    let sigma = params.sigma();
    let values: Vec<f64> = gamma
        .iter()
        .map(|&g| {
            params.theta + g + sigma * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut r)
        })
        .collect();
    let spec =
        ContaminationSpec { k, kind: ContaminationKind::Custom { gamma: gamma.clone() }, gamma };
    Ok((Sample::new(values)?, spec))
}

/// Rule mapping n to the contamination count of a sweep configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum KRule {
    SqrtN,
    Frac { rho: f64 },
    /// `k = floor(n/2 - c sqrt(n))`.
    NearHalf { c: f64 },
    Fixed { k: usize },
}

impl KRule {
    pub fn k_for(&self, n: usize) -> usize {
        let nf = n as f64;
        let k = match self {
            KRule::SqrtN => nf.sqrt().floor(),
            KRule::Frac { rho } => (rho * nf).floor(),
            KRule::NearHalf { c } => (nf / 2.0 - c * nf.sqrt()).floor(),
            KRule::Fixed { k } => *k as f64,
        };
        (k.max(1.0) as usize).min(n / 2 - 1)
    }
}

/// Sweep configuration; serialized as JSON for the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub n_list: Vec<usize>,
    pub k_rule: KRule,
    pub contamination: ContaminationKind,
    pub trials: usize,
    pub estimators: Vec<String>,
    pub seed: u64,
    #[serde(default)]
    pub theta: f64,
    #[serde(default = "default_sigma2")]
    pub sigma2: f64,
}

fn default_sigma2() -> f64 {
    1.0
}

/// Per-trial, per-estimator record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialResult {
    pub estimator_id: String,
    pub n: usize,
    pub k: usize,
    pub trial: usize,
    pub theta_err: f64,
    pub var_rel_err: Option<f64>,
    pub tv_err: Option<f64>,
    pub seed: u64,
    pub wall_time_ms: f64,
    pub error: Option<String>,
}

/// One aggregate table row per (estimator, n, k).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AggregateRow {
    pub estimator: String,
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    pub median_err: f64,
    pub q10: f64,
    pub q90: f64,
    pub theory_rate: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<TrialResult>,
    pub table: Vec<AggregateRow>,
}

impl SweepResult {
    /// Aggregate table as CSV, formatted with shortest round-trip decimals
    /// for byte-stable diffs.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("estimator,n,k,trials,median_err,q10,q90,theory_rate,ratio\n");
        for row in &self.table {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                row.estimator,
                row.n,
                row.k,
                row.trials,
                row.median_err,
                row.q10,
                row.q90,
                row.theory_rate,
                row.ratio
            ));
        }
        out
    }
}

/// Known estimator ids accepted by sweeps and the CLI.
pub const ESTIMATOR_IDS: &[&str] = &[
    "zero",
    "median",
    "kernel_mode",
    "caijin",
    "fourier_known",
    "fourier_unknown",
    "lepski",
    "var_fourier",
    "var_single_freq",
];

fn variance_primary(id: &str) -> bool {
    matches!(id, "var_fourier" | "var_single_freq")
}

fn run_estimator(
    id: &str,
    sample: &Sample,
    truth: &NullParams,
    k: usize,
    hp: &Hyperparams,
    seed: u64,
) -> Result<(f64, Option<f64>, Option<f64>)> {
    let theta = truth.theta;
    let sigma2 = truth.sigma2;
    match id {
        "zero" => Ok((theta.abs(), None, None)),
        "median" => Ok(((sample_median(sample) - theta).abs(), None, None)),
        "kernel_mode" => {
            let h = mode_bandwidth(k, sample.n(), hp)? * sigma2.sqrt();
            Ok(((kernel_mode(sample, h)?.theta_hat - theta).abs(), None, None))
        }
        "caijin" => {
            let cfg = CaiJinConfig::default();
            let loc = caijin_location(sample, &cfg)?;
            let var = caijin_variance(sample, &cfg).ok();
            Ok((
                (loc - theta).abs(),
                var.map(|v| (v - sigma2).abs() / sigma2),
                None,
            ))
        }
        "fourier_known" => {
            let est = estimate_location_known_var(sample, k, sigma2, hp)?;
            Ok(((est.theta_hat - theta).abs(), None, None))
        }
        "fourier_unknown" => {
            let est = estimate_location_unknown_var(sample, k, hp, seed)?;
            let var_err = est.v_hat.map(|v| (v - sigma2).abs() / sigma2);
            Ok(((est.theta_hat - theta).abs(), var_err, None))
        }
        "lepski" => {
            let est = adaptive_null_estimate(sample, hp, seed)?;
            let tv = tv_gaussian_surrogate(&est.params, truth);
            Ok((
                (est.params.theta - theta).abs(),
                Some((est.params.sigma2 - sigma2).abs() / sigma2),
                Some(tv),
            ))
        }
        "var_fourier" => {
            let est = estimate_variance(sample, k, hp, seed)?;
            Ok((0.0, Some((est.sigma2_hat - sigma2).abs() / sigma2), None))
        }
        "var_single_freq" => {
            let pilot = pilot_variance(sample, &PilotConfig::from_defaults(sample.n(), hp, seed))?;
            let omega = single_frequency_omega(pilot.sqrt(), k, sample.n());
            let est = single_frequency_variance(sample, omega)?;
            Ok((0.0, Some((est - sigma2).abs() / sigma2), None))
        }
        other => Err(Error::UnknownEstimator(other.to_string())),
    }
}

/// Runs the sweep on the current rayon pool. Results are gathered in
/// (n, k, trial, estimator) order before aggregation, so the table is
/// deterministic for a fixed seed regardless of parallelism.
pub fn run_sweep(spec: &SweepSpec, hp: &Hyperparams) -> Result<SweepResult> {
    if spec.trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    for id in &spec.estimators {
        if !ESTIMATOR_IDS.contains(&id.as_str()) {
            return Err(Error::UnknownEstimator(id.clone()));
        }
    }
    let truth = NullParams::new(spec.theta, spec.sigma2)?;
    let configs: Vec<(usize, usize)> =
        spec.n_list.iter().map(|&n| (n, spec.k_rule.k_for(n))).collect();
    let jobs: Vec<(usize, usize, usize)> = configs
        .iter()
        .flat_map(|&(n, k)| (0..spec.trials).map(move |t| (n, k, t)))
        .collect();

    let rows_nested: Vec<Vec<TrialResult>> = jobs
        .par_iter()
        .map(|&(n, k, trial)| {
            let trial_seed =
                rng::stream(spec.seed, &[n as u64, k as u64, trial as u64]).random::<u64>();
            let mut out = Vec::with_capacity(spec.estimators.len());
            let realized = ContaminationSpec::realize(
                spec.contamination.clone(),
                k,
                n,
                hp,
                trial_seed,
            );
            let sample = realized
                .as_ref()
                .map_err(|e| e.to_string())
                .and_then(|c| generate_frequentist(&truth, c, trial_seed).map_err(|e| e.to_string()));
            for id in &spec.estimators {
                let started = Instant::now();
                let outcome = sample
                    .as_ref()
                    .map_err(|e| e.clone())
                    .and_then(|s| run_estimator(id, s, &truth, k, hp, trial_seed).map_err(|e| e.to_string()));
                let wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
                let row = match outcome {
                    Ok((theta_err, var_rel_err, tv_err)) => TrialResult {
                        estimator_id: id.clone(),
                        n,
                        k,
                        trial,
                        theta_err,
                        var_rel_err,
                        tv_err,
                        seed: trial_seed,
                        wall_time_ms,
                        error: None,
                    },
                    Err(message) => TrialResult {
                        estimator_id: id.clone(),
                        n,
                        k,
                        trial,
                        theta_err: 0.0,
                        var_rel_err: None,
                        tv_err: None,
                        seed: trial_seed,
                        wall_time_ms,
                        error: Some(message),
                    },
                };
                out.push(row);
            }
            out
        })
        .collect();
    let rows: Vec<TrialResult> = rows_nested.into_iter().flatten().collect();

    let mut table = Vec::new();
    for &(n, k) in &configs {
        for id in &spec.estimators {
            let errs: Vec<f64> = rows
                .iter()
                .filter(|r| r.n == n && r.k == k && &r.estimator_id == id && r.error.is_none())
                .map(|r| {
                    if variance_primary(id) {
                        r.var_rel_err.unwrap_or(f64::NAN)
                    } else {
                        r.theta_err
                    }
                })
                .collect();
            if errs.is_empty() {
                continue;
            }
            let theory_rate = if variance_primary(id) {
                rate_variance(k, n)?.sqrt()
            } else {
                rate_location_sq(k, n, spec.sigma2)?.sqrt()
            };
            let median_err = quantile(&errs, 0.5);
            table.push(AggregateRow {
                estimator: id.clone(),
                n,
                k,
                trials: errs.len(),
                median_err,
                q10: quantile(&errs, 0.1),
                q90: quantile(&errs, 0.9),
                theory_rate,
                ratio: median_err / theory_rate,
            });
        }
    }
    Ok(SweepResult { rows, table })
}

/// Runs the sweep on a dedicated pool with `threads` workers; used by the
/// reproducibility checks.
pub fn run_sweep_with_threads(
    spec: &SweepSpec,
    hp: &Hyperparams,
    threads: usize,
) -> Result<SweepResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(|| run_sweep(spec, hp))
}

/// Empirical quantile by nearest sorted index.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let idx = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[idx]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hp() -> Hyperparams {
        Hyperparams::default()
    }

    #[test]
    fn frequentist_clt_sanity() {
        let truth = NullParams::new(2.0, 1.0).unwrap();
        let n = 4000;
        let spec =
            ContaminationSpec::realize(ContaminationKind::Zero, 0, n, &hp(), 0).unwrap();
        for seed in 0..5 {
            let s = generate_frequentist(&truth, &spec, seed).unwrap();
            let mean = s.values().iter().sum::<f64>() / n as f64;
            assert!((mean - 2.0).abs() < 4.0 / (n as f64).sqrt());
        }
    }

    #[test]
    fn frequentist_near_deterministic_at_tiny_sigma() {
        let truth = NullParams::new(1.0, 1e-18).unwrap();
        let spec = ContaminationSpec::realize(
            ContaminationKind::ConstantShift { value: 3.0 },
            2,
            6,
            &hp(),
            0,
        )
        .unwrap();
        let s = generate_frequentist(&truth, &spec, 1).unwrap();
        for (x, g) in s.values().iter().zip(&spec.gamma) {
            assert!((x - (1.0 + g)).abs() < 1e-8);
        }
    }

    #[test]
    fn pi_over_omega_count() {
        let spec = ContaminationSpec::realize(
            ContaminationKind::PiOverOmega { omega: 0.5 },
            7,
            20,
            &hp(),
            0,
        )
        .unwrap();
        let expect = std::f64::consts::PI / 0.5;
        assert_eq!(spec.gamma.iter().filter(|g| **g == expect).count(), 7);
        assert_eq!(spec.nonzeros(), 7);
    }

    #[test]
    fn bayes_binomial_count() {
        let truth = NullParams::new(0.0, 1.0).unwrap();
        let (n, eps) = (5000usize, 0.2f64);
        for seed in 0..5 {
            let (_, spec) = generate_bayes(
                eps,
                &truth,
                &QSpec::PointMass { value: 3.0 },
                n,
                &hp(),
                seed,
            )
            .unwrap();
            let mean = n as f64 * eps;
            assert!(
                (spec.k as f64 - mean).abs() <= 4.0 * mean.sqrt(),
                "count {} vs mean {mean}",
                spec.k
            );
        }
    }

    #[test]
    fn bayes_eps_zero_is_pure_null() {
        let truth = NullParams::new(1.0, 1.0).unwrap();
        let (s, spec) =
            generate_bayes(0.0, &truth, &QSpec::PointMass { value: 9.0 }, 1000, &hp(), 3).unwrap();
        assert_eq!(spec.k, 0);
        let mean = s.values().iter().sum::<f64>() / 1000.0;
        assert!((mean - 1.0).abs() < 0.14);
    }

    #[test]
    fn sweep_zero_estimator_exact() {
        let spec = SweepSpec {
            n_list: vec![100],
            k_rule: KRule::Fixed { k: 5 },
            contamination: ContaminationKind::ConstantShift { value: 10.0 },
            trials: 3,
            estimators: vec!["zero".into()],
            seed: 9,
            theta: 1.25,
            sigma2: 1.0,
        };
        let result = run_sweep(&spec, &hp()).unwrap();
        assert_eq!(result.rows.len(), 3);
        for row in &result.rows {
            assert_eq!(row.theta_err, 1.25);
        }
        assert_eq!(result.table.len(), 1);
        assert_eq!(result.table[0].median_err, 1.25);
    }

    #[test]
    fn sweep_unknown_estimator_rejected() {
        let spec = SweepSpec {
            n_list: vec![100],
            k_rule: KRule::SqrtN,
            contamination: ContaminationKind::Zero,
            trials: 1,
            estimators: vec!["nope".into()],
            seed: 0,
            theta: 0.0,
            sigma2: 1.0,
        };
        assert!(matches!(run_sweep(&spec, &hp()), Err(Error::UnknownEstimator(_))));
    }

    #[test]
    fn sweep_reproducible_across_thread_counts() {
        let spec = SweepSpec {
            n_list: vec![200, 400],
            k_rule: KRule::Frac { rho: 0.2 },
            contamination: ContaminationKind::ConstantShift { value: 8.0 },
            trials: 4,
            estimators: vec!["median".into(), "fourier_known".into()],
            seed: 31,
            theta: 0.5,
            sigma2: 1.0,
        };
        let h = hp();
        let csv1 = run_sweep_with_threads(&spec, &h, 1).unwrap().to_csv();
        let csv4 = run_sweep_with_threads(&spec, &h, 4).unwrap().to_csv();
        assert_eq!(csv1, csv4);
    }
}
