//! Command-line front end: estimation on user data, data simulation,
//! Monte Carlo sweeps, rate tables, and lower-bound verification.
//!
//! Exit codes: 0 success, 2 input/spec parse error, 3 non-identifiable k,
//! 4 estimator-internal failure, 5 failed lower-bound verification.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use null_est::adaptation::adaptive_null_estimate;
use null_est::location::{estimate_location_with_variance, tau_known_var};
use null_est::lowerbound::verify_construction;
use null_est::rates::{rate_tv, RatePoint};
use null_est::sim::{generate_frequentist, run_sweep, SweepSpec};
use null_est::types::{ContaminationKind, ContaminationSpec, Hyperparams, NullParams, Sample};
use null_est::variance::{estimate_variance_with_pilot, pilot_variance, PilotConfig};
use null_est::Error;

const EXIT_PARSE: u8 = 2;
const EXIT_IDENTIFIABILITY: u8 = 3;
const EXIT_ESTIMATOR: u8 = 4;
const EXIT_VERIFY: u8 = 5;

#[derive(Parser)]
#[command(
    name = "null-est",
    about = "Empirical null estimation from contaminated z-scores",
    long_about = "Estimates the null distribution N(theta, sigma^2) from z-scores with up to \
                  k < n/2 arbitrary mean shifts, using Fourier min-sup-inf estimators. \
                  Hyperparameters are overridable with repeated --set key=value flags; \
                  NULL_EST_THREADS caps the worker count."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate (theta, sigma^2) from a file of newline-delimited reals.
    Estimate(EstimateArgs),
    /// Generate synthetic contaminated data to a file.
    Simulate(SimulateArgs),
    /// Run a Monte Carlo sweep from a JSON spec.
    Sweep(SweepArgs),
    /// Verify the lower-bound prior construction numerically.
    VerifyLowerbound(VerifyArgs),
    /// Print minimax rate values.
    Rates(RatesArgs),
}

#[derive(Args)]
struct EstimateArgs {
    /// Input file: one decimal per line, '#' lines ignored.
    #[arg(short, long)]
    input: PathBuf,
    /// Contamination count; mutually exclusive with --adaptive.
    #[arg(short, long, conflicts_with = "adaptive")]
    k: Option<usize>,
    /// Adapt to unknown k with Lepski's method.
    #[arg(long)]
    adaptive: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Hyperparameter override, repeatable: --set c_tau=0.7
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    theta: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma2: f64,
    #[arg(long, value_enum, default_value_t = GammaKind::ConstantShift)]
    gamma_kind: GammaKind,
    /// Numeric parameter of the contamination kind (shift value, omega,
    /// block value, or eps for the prior kinds).
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    gamma_value: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum GammaKind {
    Zero,
    ConstantShift,
    PiOverOmega,
    TwoSidedBlocks,
    PriorG0,
    PriorG1,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep spec JSON (see SweepSpec in the library).
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated contamination levels, e.g. 0.1,0.3,0.45
    #[arg(long, value_delimiter = ',')]
    eps: Vec<f64>,
    #[arg(long)]
    n: usize,
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RatesArgs {
    #[arg(long)]
    n: usize,
    /// Comma-separated contamination counts.
    #[arg(long, value_delimiter = ',')]
    k: Vec<usize>,
    #[arg(long, default_value_t = 1.0)]
    sigma2: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Serialize)]
#[serde(untagged)]
enum KUsed {
    K(usize),
    Adaptive(&'static str),
}

#[derive(Serialize)]
struct EstimateOutput {
    theta_hat: f64,
    sigma2_hat: f64,
    k_used_or_adaptive: KUsed,
    tau: f64,
    pilot_sigma2: f64,
    tv_rate_bound: f64,
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("NULL_EST_THREADS") {
        if let Ok(threads) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
        }
    }
    let cli = Cli::parse();
    match cli.command {
        Command::Estimate(args) => cmd_estimate(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::VerifyLowerbound(args) => cmd_verify_lowerbound(args),
        Command::Rates(args) => cmd_rates(args),
    }
}

fn apply_sets(hp: &mut Hyperparams, sets: &[String]) -> Result<(), String> {
    for kv in sets {
        let (key, value) = kv
            .split_once('=')
            .ok_or_else(|| format!("--set expects key=value, got `{kv}`"))?;
        hp.set(key.trim(), value.trim()).map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn parse_input(path: &PathBuf) -> Result<Sample, (u8, String)> {
    let text = fs::read_to_string(path)
        .map_err(|e| (EXIT_PARSE, format!("cannot read {}: {e}", path.display())))?;
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let v: f64 = trimmed
            .parse()
            .map_err(|_| (EXIT_PARSE, format!("line {}: malformed value `{trimmed}`", lineno + 1)))?;
        values.push(v);
    }
    Sample::new(values).map_err(|e| (EXIT_PARSE, e.to_string()))
}

fn write_out(output: Option<&PathBuf>, content: &str) -> Result<(), String> {
    match output {
        Some(path) => fs::write(path, content).map_err(|e| e.to_string()),
        None => {
            let mut stdout = std::io::stdout();
            stdout.write_all(content.as_bytes()).map_err(|e| e.to_string())
        }
    }
}

fn fail(code: u8, message: &str) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(code)
}

fn estimator_exit(e: &Error) -> u8 {
    match e {
        Error::KNotIdentifiable { .. } => EXIT_IDENTIFIABILITY,
        _ => EXIT_ESTIMATOR,
    }
}

fn cmd_estimate(args: EstimateArgs) -> ExitCode {
    let mut hp = Hyperparams::default();
    if let Err(m) = apply_sets(&mut hp, &args.set) {
        return fail(EXIT_PARSE, &m);
    }
    if args.k.is_none() && !args.adaptive {
        return fail(EXIT_PARSE, "exactly one of --k or --adaptive is required");
    }
    let sample = match parse_input(&args.input) {
        Ok(s) => s,
        Err((code, m)) => return fail(code, &m),
    };
    let n = sample.n();
    let out = if args.adaptive {
        match adaptive_null_estimate(&sample, &hp, args.seed) {
            Ok(est) => {
                let k_ref = est.location.k_prime.unwrap_or(1);
                EstimateOutput {
                    theta_hat: est.params.theta,
                    sigma2_hat: est.params.sigma2,
                    k_used_or_adaptive: KUsed::Adaptive("adaptive"),
                    tau: tau_known_var(k_ref, n, &hp) / est.params.sigma2.sqrt(),
                    pilot_sigma2: est.pilot_sigma2,
                    tv_rate_bound: rate_tv(k_ref, n).unwrap_or(1.0),
                }
            }
            Err(e) => return fail(estimator_exit(&e), &e.to_string()),
        }
    } else {
        let k = args.k.unwrap();
        if 2 * k >= n {
            return fail(
                EXIT_IDENTIFIABILITY,
                &format!("k = {k} is not identifiable for n = {n}: need k < n/2"),
            );
        }
        let run = || -> null_est::Result<EstimateOutput> {
            let pilot =
                pilot_variance(&sample, &PilotConfig::from_defaults(n, &hp, args.seed))?;
            let var = estimate_variance_with_pilot(&sample, k, pilot, &hp)?;
            let loc = estimate_location_with_variance(&sample, k, var.sigma2_hat, &hp)?;
            Ok(EstimateOutput {
                theta_hat: loc.theta_hat,
                sigma2_hat: var.sigma2_hat,
                k_used_or_adaptive: KUsed::K(k),
                tau: loc.tau_used,
                pilot_sigma2: pilot,
                tv_rate_bound: rate_tv(k, n)?,
            })
        };
        match run() {
            Ok(out) => out,
            Err(e) => return fail(estimator_exit(&e), &e.to_string()),
        }
    };
    let json = serde_json::to_string(&out).expect("serialize");
    match write_out(args.output.as_ref(), &format!("{json}\n")) {
        Ok(()) => ExitCode::SUCCESS,
        Err(m) => fail(EXIT_ESTIMATOR, &m),
    }
}

fn cmd_simulate(args: SimulateArgs) -> ExitCode {
    let mut hp = Hyperparams::default();
    if let Err(m) = apply_sets(&mut hp, &args.set) {
        return fail(EXIT_PARSE, &m);
    }
    let kind = match args.gamma_kind {
        GammaKind::Zero => ContaminationKind::Zero,
        GammaKind::ConstantShift => ContaminationKind::ConstantShift { value: args.gamma_value },
        GammaKind::PiOverOmega => ContaminationKind::PiOverOmega { omega: args.gamma_value },
        GammaKind::TwoSidedBlocks => ContaminationKind::TwoSidedBlocks { value: args.gamma_value },
        GammaKind::PriorG0 => ContaminationKind::PriorG0 { eps: args.gamma_value },
        GammaKind::PriorG1 => ContaminationKind::PriorG1 { eps: args.gamma_value },
    };
    let run = || -> null_est::Result<String> {
        let truth = NullParams::new(args.theta, args.sigma2)?;
        let spec = ContaminationSpec::realize(kind, args.k, args.n, &hp, args.seed)?;
        let sample = generate_frequentist(&truth, &spec, args.seed)?;
        let mut content = String::with_capacity(sample.n() * 20);
        for v in sample.values() {
            content.push_str(&format!("{v}\n"));
        }
        Ok(content)
    };
    match run() {
        Ok(content) => match write_out(Some(&args.output), &content) {
            Ok(()) => ExitCode::SUCCESS,
            Err(m) => fail(EXIT_ESTIMATOR, &m),
        },
        Err(e) => fail(estimator_exit(&e), &e.to_string()),
    }
}

fn cmd_sweep(args: SweepArgs) -> ExitCode {
    let mut hp = Hyperparams::default();
    if let Err(m) = apply_sets(&mut hp, &args.set) {
        return fail(EXIT_PARSE, &m);
    }
    let text = match fs::read_to_string(&args.input) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_PARSE, &format!("cannot read {}: {e}", args.input.display())),
    };
    let spec: SweepSpec = match serde_json::from_str(&text) {
        Ok(s) => s,
        Err(e) => return fail(EXIT_PARSE, &format!("sweep spec: {e}")),
    };
    let result = match run_sweep(&spec, &hp) {
        Ok(r) => r,
        Err(e @ Error::UnknownEstimator(_)) => return fail(EXIT_PARSE, &e.to_string()),
        Err(e) => return fail(estimator_exit(&e), &e.to_string()),
    };
    let content = match args.format {
        Format::Csv => result.to_csv(),
        Format::Json => format!("{}\n", serde_json::to_string(&result).expect("serialize")),
    };
    match write_out(args.output.as_ref(), &content) {
        Ok(()) => ExitCode::SUCCESS,
        Err(m) => fail(EXIT_ESTIMATOR, &m),
    }
}

fn cmd_verify_lowerbound(args: VerifyArgs) -> ExitCode {
    let mut hp = Hyperparams::default();
    if let Err(m) = apply_sets(&mut hp, &args.set) {
        return fail(EXIT_PARSE, &m);
    }
    if args.eps.is_empty() {
        return fail(EXIT_PARSE, "--eps requires at least one value");
    }
    let mut reports = Vec::new();
    let mut failed = Vec::new();
    for &eps in &args.eps {
        match verify_construction(eps, args.n, &hp) {
            Ok(report) => {
                if !report.passed() {
                    failed.push(format!("eps = {eps}: {}", report.failures.join("; ")));
                }
                reports.push(report);
            }
            Err(e) => return fail(EXIT_PARSE, &e.to_string()),
        }
    }
    let json = serde_json::to_string_pretty(&reports).expect("serialize");
    if let Err(m) = write_out(args.output.as_ref(), &format!("{json}\n")) {
        return fail(EXIT_ESTIMATOR, &m);
    }
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        fail(EXIT_VERIFY, &failed.join("\n"))
    }
}

fn cmd_rates(args: RatesArgs) -> ExitCode {
    let mut points = Vec::new();
    for &k in &args.k {
        match RatePoint::new(k, args.n, args.sigma2) {
            Ok(p) => points.push(p),
            Err(e) => return fail(EXIT_IDENTIFIABILITY, &e.to_string()),
        }
    }
    let content = match args.format {
        Format::Json => format!("{}\n", serde_json::to_string(&points).expect("serialize")),
        Format::Csv => {
            let mut out = String::from("k,n,location_rate_sq,variance_rate,tv_rate\n");
            for p in &points {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    p.k, p.n, p.location_rate_sq, p.variance_rate, p.tv_rate
                ));
            }
            out
        }
    };
    match write_out(None, &content) {
        Ok(()) => ExitCode::SUCCESS,
        Err(m) => fail(EXIT_ESTIMATOR, &m),
    }
}
