use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use cosfit::bench::{self, InitMethod, Table, DEFAULT_TIMING_LENGTHS};
use cosfit::lmfit::LmConfig;
use cosfit::report::FitReport;
use cosfit::synth::{self, SynthConfig, DEFAULT_JITTER};
use cosfit::{fipeft, io as csvio, lombscargle, Error, ModelParams};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;

/// Fit y = a1 + a2·cos(a3·x + a4) to unevenly sampled data.
#[derive(Parser)]
#[command(name = "cosfit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a jittered, noisy cosine signal as x,y CSV.
    Synth(SynthArgs),
    /// Estimate initial parameters and refine them by least squares.
    Fit(FitArgs),
    /// Write the Lomb-Scargle periodogram of a signal as f,p,peak CSV.
    Periodogram(PeriodogramArgs),
    /// Run the fit-success benchmark for one table.
    Bench(BenchArgs),
    /// Compare the run time of the two frequency estimators.
    Timing(TimingArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Number of periods covered.
    #[arg(long, default_value_t = 10.0)]
    periods: f64,
    /// Mean number of samples per unit of x.
    #[arg(long, default_value_t = 20.0)]
    fs: f64,
    /// Signal-to-noise ratio in dB; noise-free when omitted.
    #[arg(long)]
    snr: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sampling jitter as a fraction of the mean spacing, in [0, 0.5).
    #[arg(long, default_value_t = DEFAULT_JITTER)]
    jitter: f64,
    #[arg(long, default_value_t = 10.0)]
    a1: f64,
    #[arg(long, default_value_t = 5.0)]
    a2: f64,
    /// Frequency in cycles per unit of x.
    #[arg(long, default_value_t = 0.25)]
    freq: f64,
    #[arg(long, default_value_t = 1.0)]
    a4: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    input: PathBuf,
    /// Initializer: fipeft or lombscargle.
    #[arg(long, default_value = "fipeft")]
    init: InitMethod,
    /// Report file (TOML); the report goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 500)]
    max_iterations: usize,
}

#[derive(Args)]
struct PeriodogramArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// p10, p5, p2, p1 or p05.
    #[arg(long)]
    table: Table,
    /// Number of trials per cell.
    #[arg(long, default_value_t = 50)]
    seeds: u64,
    /// First seed; trials use consecutive seeds from here.
    #[arg(long, default_value_t = 0)]
    seed_base: u64,
    /// Comma-separated initializers.
    #[arg(long, value_delimiter = ',', default_value = "fipeft,lombscargle")]
    init: Vec<InitMethod>,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TimingArgs {
    /// Comma-separated signal lengths.
    #[arg(long, value_delimiter = ',')]
    lengths: Option<Vec<usize>>,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn open_output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn synth_cmd(a: SynthArgs) -> anyhow::Result<u8> {
    let truth = ModelParams::new(a.a1, a.a2, std::f64::consts::TAU * a.freq, a.a4);
    let sigma = a.snr.map_or(0.0, |snr| synth::sigma_for_snr(a.a2, snr));
    let cfg = SynthConfig::new(truth, a.periods, a.fs)
        .with_sigma(sigma)
        .with_seed(a.seed)
        .with_jitter(a.jitter);
    let s = synth::generate(&cfg)?;
    csvio::write_signal_file(&a.out, &s)?;
    eprintln!("wrote {} samples to {}", s.len(), a.out.display());
    Ok(0)
}

fn fit_cmd(a: FitArgs) -> anyhow::Result<u8> {
    let s = csvio::read_signal_file(&a.input)?;
    let cfg = LmConfig {
        max_iterations: a.max_iterations,
        ..LmConfig::default()
    };
    let fit = bench::fit_signal(&s, a.init, &cfg)?;
    let report = FitReport::new(a.init.name(), &fit);
    match &a.out {
        Some(p) => report.write_file(p)?,
        None => print!("{}", report.to_toml()?),
    }
    println!("frequency = {:.6}", fit.frequency());
    println!("chi2 = {:.6e}", fit.chi2);
    if fit.converged {
        Ok(0)
    } else {
        eprintln!(
            "warning: no convergence after {} iterations",
            fit.iterations
        );
        Ok(EXIT_NOT_CONVERGED)
    }
}

fn periodogram_cmd(a: PeriodogramArgs) -> anyhow::Result<u8> {
    let s = csvio::read_signal_file(&a.input)?;
    let a1 = fipeft::prepare_stats(&s).a1_hat;
    let pg = lombscargle::periodogram(&s, a1)?;
    csvio::write_periodogram_file(&a.out, &pg)?;
    if let Some(f) = pg.peak_frequency() {
        println!("peak frequency = {f:.6}");
    }
    Ok(0)
}

fn bench_cmd(a: BenchArgs) -> anyhow::Result<u8> {
    if a.seeds == 0 {
        return Err(Error::InvalidConfig("--seeds must be at least 1".into()).into());
    }
    let seeds = (a.seed_base..a.seed_base + a.seeds).collect();
    let cells = bench::run_bench(&a.table.spec(seeds, a.init))?;
    let mut w = csv::Writer::from_writer(open_output(a.out.as_deref())?);
    w.write_record([
        "method",
        "periods",
        "sigma",
        "snr_db",
        "fs",
        "seeds",
        "init_median",
        "init_success",
        "fitted_median",
        "fitted_success",
    ])?;
    for c in &cells {
        w.write_record([
            c.method.name().to_string(),
            c.periods.to_string(),
            c.sigma.to_string(),
            format!("{:.2}", c.snr_db),
            c.fs.to_string(),
            c.seeds.to_string(),
            format!("{:.4}", c.init_median),
            format!("{:.3}", c.init_success),
            format!("{:.4}", c.fitted_median),
            format!("{:.3}", c.fitted_success),
        ])?;
    }
    w.flush()?;
    Ok(0)
}

fn timing_cmd(a: TimingArgs) -> anyhow::Result<u8> {
    let lengths = a.lengths.unwrap_or_else(|| DEFAULT_TIMING_LENGTHS.to_vec());
    let rows = bench::run_timing(&lengths, a.repeats, a.seed)?;
    let mut w = csv::Writer::from_writer(open_output(a.out.as_deref())?);
    w.write_record([
        "n",
        "fipeft_ns",
        "lombscargle_ns",
        "ratio",
        "fipeft_ops",
        "lombscargle_ops",
    ])?;
    for r in &rows {
        w.write_record([
            r.n.to_string(),
            format!("{:.0}", r.fipeft_ns),
            format!("{:.0}", r.lombscargle_ns),
            format!("{:.1}", r.ratio),
            r.fipeft_ops.to_string(),
            r.lombscargle_ops.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(0)
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::InvalidConfig(_)) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Synth(a) => synth_cmd(a),
        Command::Fit(a) => fit_cmd(a).context("fit failed"),
        Command::Periodogram(a) => periodogram_cmd(a),
        Command::Bench(a) => bench_cmd(a),
        Command::Timing(a) => timing_cmd(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
