//! Benchmark harness: fit-success tables over noise level and sampling rate,
//! plus a timing comparison of the two frequency estimators.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fipeft;
use crate::lmfit::{lm_fit, LmConfig};
use crate::lombscargle;
use crate::signal_model::{snr_db, FitResult, ModelParams, SampledSignal};
use crate::synth::{generate, reference_params, SynthConfig, BENCH_SIGMAS, DEFAULT_JITTER};

/// Relative frequency error below which a trial counts as a success.
pub const SUCCESS_THRESHOLD: f64 = 0.02;

pub const FS_COLUMNS: [f64; 6] = [2.0, 2.5, 5.0, 10.0, 20.0, 40.0];

pub const DEFAULT_TIMING_LENGTHS: [usize; 6] = [80, 160, 320, 640, 800, 1600];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InitMethod {
    Fipeft,
    LombScargle,
}

impl InitMethod {
    pub const ALL: [InitMethod; 2] = [InitMethod::Fipeft, InitMethod::LombScargle];

    pub fn name(self) -> &'static str {
        match self {
            InitMethod::Fipeft => "fipeft",
            InitMethod::LombScargle => "lombscargle",
        }
    }

    pub fn initialize(self, s: &SampledSignal) -> Result<ModelParams> {
        match self {
            InitMethod::Fipeft => fipeft::estimate_initial_params(s),
            InitMethod::LombScargle => lombscargle::estimate_initial_params(s),
        }
    }
}

impl fmt::Display for InitMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InitMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fipeft" => Ok(InitMethod::Fipeft),
            "lombscargle" | "lomb-scargle" | "ls" => Ok(InitMethod::LombScargle),
            other => Err(Error::InvalidConfig(format!(
                "unknown initializer {other:?}"
            ))),
        }
    }
}

/// Initialize with `method`, then refine.
pub fn fit_signal(s: &SampledSignal, method: InitMethod, cfg: &LmConfig) -> Result<FitResult> {
    let start = Instant::now();
    let initial = method.initialize(s)?;
    let init_clock_ns = start.elapsed().as_nanos() as u64;
    let fit = lm_fit(s, initial, cfg)?;
    Ok(FitResult {
        initial,
        refined: fit.params,
        chi2: fit.chi2,
        iterations: fit.iterations,
        converged: fit.converged,
        init_clock_ns,
    })
}

/// The benchmark tables, named by the number of periods covered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Table {
    P10,
    P5,
    P2,
    P1,
    P05,
}

impl Table {
    pub fn periods(self) -> f64 {
        match self {
            Table::P10 => 10.0,
            Table::P5 => 5.0,
            Table::P2 => 2.0,
            Table::P1 => 1.0,
            Table::P05 => 0.5,
        }
    }

    /// Sampling-rate columns; half a period at `fs = 2` gives four samples
    /// and is left out.
    pub fn fs_columns(self) -> Vec<f64> {
        match self {
            Table::P05 => FS_COLUMNS[1..].to_vec(),
            _ => FS_COLUMNS.to_vec(),
        }
    }

    pub fn spec(self, seeds: Vec<u64>, methods: Vec<InitMethod>) -> BenchSpec {
        BenchSpec {
            periods: self.periods(),
            fs_values: self.fs_columns(),
            sigmas: BENCH_SIGMAS.to_vec(),
            seeds,
            methods,
            jitter: DEFAULT_JITTER,
        }
    }
}

impl FromStr for Table {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "p10" => Ok(Table::P10),
            "p5" => Ok(Table::P5),
            "p2" => Ok(Table::P2),
            "p1" => Ok(Table::P1),
            "p05" => Ok(Table::P05),
            other => Err(Error::InvalidConfig(format!("unknown table {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSpec {
    pub periods: f64,
    pub fs_values: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub seeds: Vec<u64>,
    pub methods: Vec<InitMethod>,
    pub jitter: f64,
}

/// Frequencies from one trial; `None` where a stage returned an error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub seed: u64,
    pub init_freq: Option<f64>,
    pub fitted_freq: Option<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchCell {
    pub method: InitMethod,
    pub sigma: f64,
    /// Infinite for noise-free cells.
    pub snr_db: f64,
    pub fs: f64,
    pub periods: f64,
    pub seeds: usize,
    pub init_median: f64,
    pub init_success: f64,
    pub fitted_median: f64,
    pub fitted_success: f64,
    pub trials: Vec<TrialOutcome>,
}

/// Median of the values, NaN for an empty slice.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn is_success(f: Option<f64>, f_true: f64) -> bool {
    f.is_some_and(|f| ((f - f_true) / f_true).abs() <= SUCCESS_THRESHOLD)
}

pub fn run_trial(
    method: InitMethod,
    truth: ModelParams,
    periods: f64,
    fs: f64,
    sigma: f64,
    jitter: f64,
    seed: u64,
) -> Result<TrialOutcome> {
    let cfg = SynthConfig::new(truth, periods, fs)
        .with_sigma(sigma)
        .with_jitter(jitter)
        .with_seed(seed);
    let s = generate(&cfg)?;
    let Ok(init) = method.initialize(&s) else {
        return Ok(TrialOutcome {
            seed,
            init_freq: None,
            fitted_freq: None,
            converged: false,
        });
    };
    let fit = lm_fit(&s, init, &LmConfig::default()).ok();
    Ok(TrialOutcome {
        seed,
        init_freq: Some(init.frequency()),
        fitted_freq: fit.as_ref().map(|f| f.params.frequency()),
        converged: fit.is_some_and(|f| f.converged),
    })
}

/// Runs every (method, σ, fs, seed) trial. Trials run in parallel; cells come
/// back ordered by method, then σ, then fs, with trials in seed-list order.
pub fn run_bench(spec: &BenchSpec) -> Result<Vec<BenchCell>> {
    if spec.seeds.is_empty() {
        return Err(Error::InvalidConfig("at least one seed is required".into()));
    }
    let truth = reference_params();
    let f_true = truth.frequency();

    let mut keys = Vec::new();
    for &method in &spec.methods {
        for &sigma in &spec.sigmas {
            for &fs in &spec.fs_values {
                keys.push((method, sigma, fs));
            }
        }
    }
    let jobs: Vec<(usize, u64)> = (0..keys.len())
        .flat_map(|k| spec.seeds.iter().map(move |&seed| (k, seed)))
        .collect();
    let outcomes: Vec<TrialOutcome> = jobs
        .par_iter()
        .map(|&(k, seed)| {
            let (method, sigma, fs) = keys[k];
            run_trial(method, truth, spec.periods, fs, sigma, spec.jitter, seed)
        })
        .collect::<Result<_>>()?;

    let per_cell = spec.seeds.len();
    let cells = keys
        .iter()
        .zip(outcomes.chunks(per_cell))
        .map(|(&(method, sigma, fs), trials)| {
            let inits: Vec<f64> = trials.iter().filter_map(|t| t.init_freq).collect();
            let fits: Vec<f64> = trials.iter().filter_map(|t| t.fitted_freq).collect();
            let rate = |pick: fn(&TrialOutcome) -> Option<f64>| {
                trials
                    .iter()
                    .filter(|t| is_success(pick(t), f_true))
                    .count() as f64
                    / per_cell as f64
            };
            BenchCell {
                method,
                sigma,
                snr_db: snr_db(truth.a2, sigma).unwrap_or(f64::INFINITY),
                fs,
                periods: spec.periods,
                seeds: per_cell,
                init_median: median(&inits),
                init_success: rate(|t| t.init_freq),
                fitted_median: median(&fits),
                fitted_success: rate(|t| t.fitted_freq),
                trials: trials.to_vec(),
            }
        })
        .collect();
    Ok(cells)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRow {
    pub n: usize,
    /// Median over noise levels of the per-level best time.
    pub fipeft_ns: f64,
    /// Minimum over noise levels and repeats.
    pub lombscargle_ns: f64,
    pub ratio: f64,
    /// Elementary loop steps counted in one run at the first noise level.
    pub fipeft_ops: u64,
    pub lombscargle_ops: u64,
}

/// Times the frequency stage of both estimators on signals of `n` samples
/// covering ten periods, at every benchmark noise level. Runs on the calling
/// thread only.
pub fn run_timing(lengths: &[usize], repeats: usize, seed: u64) -> Result<Vec<TimingRow>> {
    let repeats = repeats.max(1);
    let truth = reference_params();
    let periods = 10.0;
    lengths
        .iter()
        .map(|&n| {
            let fs = n as f64 * truth.frequency() / periods;
            let mut fipeft_best = Vec::with_capacity(BENCH_SIGMAS.len());
            let mut ls_min = f64::INFINITY;
            let (mut fipeft_ops, mut ls_ops) = (0, 0);
            for (level, &sigma) in BENCH_SIGMAS.iter().enumerate() {
                let s = generate(
                    &SynthConfig::new(truth, periods, fs)
                        .with_sigma(sigma)
                        .with_seed(seed),
                )?;
                let a1 = fipeft::prepare_stats(&s).a1_hat;
                let mut best = f64::INFINITY;
                for _ in 0..repeats {
                    let mut ops = 0;
                    let t = Instant::now();
                    let w = fipeft::estimate_angular_frequency_counted(&s, a1, &mut ops);
                    best = best.min(t.elapsed().as_nanos() as f64);
                    std::hint::black_box(w).ok();
                    if level == 0 {
                        fipeft_ops = ops;
                    }

                    let mut ops = 0;
                    let t = Instant::now();
                    let f = lombscargle::peak_frequency_counted(&s, a1, &mut ops);
                    ls_min = ls_min.min(t.elapsed().as_nanos() as f64);
                    std::hint::black_box(f)?;
                    if level == 0 {
                        ls_ops = ops;
                    }
                }
                fipeft_best.push(best);
            }
            let fipeft_ns = median(&fipeft_best).max(1.0);
            Ok(TimingRow {
                n,
                fipeft_ns,
                lombscargle_ns: ls_min,
                ratio: ls_min / fipeft_ns,
                fipeft_ops,
                lombscargle_ops: ls_ops,
            })
        })
        .collect()
}
