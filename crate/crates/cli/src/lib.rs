//! Command-line front end: analyze a panel, generate synthetic data, and write
//! CSV tables and SVG charts.

pub mod svg;

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use phasesync_core::io::{parse_panel_csv, write_labeled_table_csv, write_panel_csv, write_table_csv};
use phasesync_core::pipeline::{analyze, AnalysisConfig, AnalysisReport, StationarityCheck};
use phasesync_core::preprocess::Significance;
use phasesync_core::synth::{kuramoto_panel, slutsky_series, CommonKick, KuramotoConfig, RNG_IDENTITY};
use phasesync_core::BandSpec;

use svg::{render_svg, render_trajectories, ChartError, ChartKind, ChartSpec, TrajectorySpec};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] phasesync_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error("{0}")]
    Invalid(String),
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "phasesync",
    version,
    about = "Phase synchronization analysis of monthly panels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze a panel CSV and write report tables.
    Analyze(AnalyzeArgs),
    /// Generate synthetic data.
    #[command(subcommand)]
    Synth(SynthCommand),
}

fn parse_band(s: &str) -> std::result::Result<BandSpec, String> {
    s.parse::<BandSpec>().map_err(|e| e.to_string())
}

fn parse_significance(s: &str) -> std::result::Result<Significance, String> {
    let level: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    Significance::try_from(level).map_err(|e| e.to_string())
}

fn parse_kick(s: &str) -> std::result::Result<CommonKick, String> {
    let (t, d) = s
        .split_once(':')
        .ok_or_else(|| format!("expected TIME:DELTA, got {s:?}"))?;
    let time: f64 = t
        .trim()
        .parse()
        .map_err(|_| format!("kick time {t:?} is not a number"))?;
    let delta: f64 = d
        .trim()
        .parse()
        .map_err(|_| format!("kick delta {d:?} is not a number"))?;
    Ok(CommonKick { time, delta })
}

fn parse_positive_count(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(_) => Err(format!("{s:?} is not a positive integer")),
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Panel CSV: header `date,<id1>,...`, rows `YYYY-MM,<v1>,...`.
    #[arg(long)]
    pub input: PathBuf,
    /// Period band in months, `MIN:MAX`.
    #[arg(long, default_value = "24:80", value_parser = parse_band)]
    pub band: BandSpec,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// sigma(t) / mean(omega) below which a sample counts as locked.
    #[arg(long, default_value_t = 0.1)]
    pub lock_threshold: f64,
    /// Share of locked samples needed for partial phase locking.
    #[arg(long, default_value_t = 0.9)]
    pub lock_fraction: f64,
    /// Unit-root test significance: 0.01, 0.05 or 0.10.
    #[arg(long, default_value = "0.05", value_parser = parse_significance)]
    pub significance: Significance,
    /// Also write SVG charts.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Subcommand)]
pub enum SynthCommand {
    /// Panel driven by mean-field coupled phase oscillators.
    Kuramoto(KuramotoArgs),
    /// Moving sums of uniform random numbers.
    Slutsky(SlutskyArgs),
}

#[derive(Debug, Args)]
pub struct KuramotoArgs {
    #[arg(long, default_value_t = 16, value_parser = parse_positive_count)]
    pub sectors: usize,
    /// Coupling strength K, rad/month.
    #[arg(long, default_value_t = 0.4)]
    pub coupling: f64,
    /// Standard deviation of natural frequencies as a fraction of their mean.
    #[arg(long, default_value_t = 0.3)]
    pub freq_spread: f64,
    /// Period in months of the mean natural frequency.
    #[arg(long, default_value_t = 48.0)]
    pub mean_period: f64,
    /// Idiosyncratic phase noise, rad/sqrt(month).
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    /// Common phase kick `MONTH:DELTA_RAD`; repeatable.
    #[arg(long = "kick", value_parser = parse_kick)]
    pub kicks: Vec<CommonKick>,
    /// Panel length in months.
    #[arg(long, default_value_t = 240)]
    pub months: usize,
    /// Months simulated before the first panel row.
    #[arg(long, default_value_t = 120)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SlutskyArgs {
    #[arg(long, default_value_t = 100, value_parser = parse_positive_count)]
    pub n: usize,
    #[arg(long, default_value_t = 10, value_parser = parse_positive_count)]
    pub window: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(cli: Cli) -> Result<Vec<String>> {
    match cli.command {
        Command::Analyze(args) => cmd_analyze(&args),
        Command::Synth(SynthCommand::Kuramoto(args)) => cmd_synth_kuramoto(&args).map(|_| Vec::new()),
        Command::Synth(SynthCommand::Slutsky(args)) => cmd_synth_slutsky(&args).map(|_| Vec::new()),
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn prepare_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

/// Writes `contents` to `dir/name`.
fn write_file(dir: &Path, name: &str, contents: &[u8]) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(io_err(&path))
}

fn table(names: &[&str], columns: &[&[f64]]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_table_csv(names, columns, &mut buf)?;
    Ok(buf)
}

/// Runs the analysis and writes the report files. Returns the report warnings.
pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<Vec<String>> {
    let text = fs::read_to_string(&args.input).map_err(io_err(&args.input))?;
    let panel = parse_panel_csv(&text)?;
    let cfg = AnalysisConfig {
        band: args.band,
        significance: args.significance,
        lock_threshold: args.lock_threshold,
        lock_fraction: args.lock_fraction,
    };
    let report = analyze(&panel, &cfg)?;
    prepare_out_dir(&args.out)?;
    write_report(&report, &args.out)?;
    if args.svg {
        write_charts(&report, &args.out)?;
    }
    Ok(report.warnings.clone())
}

/// Writes the CSV tables and `summary.txt` for a report.
pub fn write_report(report: &AnalysisReport, dir: &Path) -> Result<()> {
    let omega: Vec<f64> = report.fits.iter().map(|f| f.omega).collect();
    let intercept: Vec<f64> = report.fits.iter().map(|f| f.intercept).collect();
    let rms: Vec<f64> = report.fits.iter().map(|f| f.rms_residual).collect();
    let mut buf = Vec::new();
    write_labeled_table_csv(
        "sector",
        &report.sector_ids,
        &["omega", "intercept", "rms_residual"],
        &[&omega, &intercept, &rms],
        &mut buf,
    )?;
    write_file(dir, "frequencies.csv", &buf)?;

    let lock = &report.lock;
    write_file(
        dir,
        "lock.csv",
        &table(
            &["t", "mu", "sigma", "lock_ratio"],
            &[&lock.times, &lock.mu, &lock.sigma, &lock.lock_ratio],
        )?,
    )?;

    let shocks = &report.shocks;
    write_file(
        dir,
        "shocks_common.csv",
        &table(
            &["t", "mean_amplitude", "common_shock"],
            &[&shocks.times, &shocks.mean_amplitude, &shocks.common_shock],
        )?,
    )?;

    let mut names = vec!["t"];
    names.extend(report.sector_ids.iter().map(String::as_str));
    let mut columns: Vec<&[f64]> = vec![&shocks.times];
    columns.extend(shocks.individual.iter().map(Vec::as_slice));
    write_file(dir, "shocks_individual.csv", &table(&names, &columns)?)?;

    let mut statistic = Vec::new();
    let mut critical = Vec::new();
    let mut level = Vec::new();
    let mut reject = Vec::new();
    let mut tested = Vec::new();
    for check in &report.stationarity {
        match check {
            StationarityCheck::Tested(r) => {
                statistic.push(r.statistic);
                critical.push(r.critical_value);
                level.push(r.significance.level());
                reject.push(if r.reject_unit_root { 1.0 } else { 0.0 });
                tested.push(1.0);
            }
            StationarityCheck::Untestable(_) => {
                let sig = report.provenance.config.significance;
                statistic.push(f64::NAN);
                critical.push(sig.critical_value());
                level.push(sig.level());
                reject.push(0.0);
                tested.push(0.0);
            }
        }
    }
    let mut buf = Vec::new();
    write_labeled_table_csv(
        "sector",
        &report.sector_ids,
        &[
            "statistic",
            "critical_value",
            "significance",
            "reject_unit_root",
            "tested",
        ],
        &[&statistic, &critical, &level, &reject, &tested],
        &mut buf,
    )?;
    write_file(dir, "stationarity.csv", &buf)?;

    write_file(dir, "summary.txt", summary(report).as_bytes())
}

pub fn summary(report: &AnalysisReport) -> String {
    let p = &report.provenance;
    let cfg = &p.config;
    let mut s = String::new();
    let ls = &report.lock_summary;
    let _ = writeln!(
        s,
        "partial phase locking: {}, fraction={:.4} (lock_ratio < {} required for {} of samples)",
        if ls.is_partially_locked { "yes" } else { "no" },
        ls.fraction_below,
        cfg.lock_threshold,
        cfg.lock_fraction
    );
    match &report.entrainment {
        Some(e) => {
            let _ = writeln!(
                s,
                "frequency entrainment: mean_omega={:.6} rad/month, std_omega={:.6}, relative_spread={:.4}",
                e.mean_omega, e.std_omega, e.relative_spread
            );
        }
        None => {
            let _ = writeln!(s, "frequency entrainment: undefined for a single sector");
        }
    }
    let passed = report.stationarity.iter().filter(|c| c.passed()).count();
    let _ = writeln!(
        s,
        "stationarity: unit root rejected for {passed} of {} sectors at {}",
        report.stationarity.len(),
        cfg.significance
    );
    let first = report.dates.first().map(ToString::to_string).unwrap_or_default();
    let last = report.dates.last().map(ToString::to_string).unwrap_or_default();
    let _ = writeln!(
        s,
        "panel: {} sectors, {} months; returns {first} to {last}",
        p.n_sectors, p.n_months
    );
    let _ = writeln!(s, "band: {} months", cfg.band);
    let _ = writeln!(s, "input sha256: {}", p.input_digest);
    for w in &report.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    s
}

fn line_chart(title: &str, y_label: &str, x: &[f64], series: Vec<(String, Vec<f64>)>) -> ChartSpec {
    ChartSpec {
        title: title.into(),
        x_label: "month".into(),
        y_label: y_label.into(),
        kind: ChartKind::Line,
        x: x.to_vec(),
        series,
    }
}

/// Writes one SVG per figure type.
pub fn write_charts(report: &AnalysisReport, dir: &Path) -> Result<()> {
    let ids = &report.sector_ids;
    let t = &report.shocks.times;

    let trajectories = TrajectorySpec {
        title: "Trajectories in the complex plane".into(),
        x_label: "x".into(),
        y_label: "H[x]".into(),
        series: ids
            .iter()
            .zip(&report.analytic)
            .map(|(id, a)| (id.clone(), a.x.iter().copied().zip(a.y.iter().copied()).collect()))
            .collect(),
    };
    write_file(dir, "trajectories.svg", render_trajectories(&trajectories)?.as_bytes())?;

    let phase = line_chart(
        "Unwrapped phase",
        "theta (rad)",
        t,
        ids.iter()
            .zip(&report.analytic)
            .map(|(id, a)| (id.clone(), a.phase_unwrapped.clone()))
            .collect(),
    );
    write_file(dir, "phase.svg", render_svg(&phase)?.as_bytes())?;

    let omega = ChartSpec {
        title: "Fitted angular frequency by sector".into(),
        x_label: "sector".into(),
        y_label: "omega (rad/month)".into(),
        kind: ChartKind::Bar,
        x: (1..=ids.len()).map(|i| i as f64).collect(),
        series: vec![("omega".into(), report.fits.iter().map(|f| f.omega).collect())],
    };
    write_file(dir, "omega.svg", render_svg(&omega)?.as_bytes())?;

    let mean_omega = report.fits.iter().map(|f| f.omega).sum::<f64>() / report.fits.len() as f64;
    let sigma = line_chart(
        "Phase-lock indicator",
        "rad/month",
        &report.lock.times,
        vec![
            ("sigma".into(), report.lock.sigma.clone()),
            ("mean omega".into(), vec![mean_omega; report.lock.len()]),
        ],
    );
    write_file(dir, "sigma.svg", render_svg(&sigma)?.as_bytes())?;

    let amplitude = line_chart(
        "Mean amplitude",
        "<A(t)>",
        t,
        vec![("mean amplitude".into(), report.shocks.mean_amplitude.clone())],
    );
    write_file(dir, "amplitude.svg", render_svg(&amplitude)?.as_bytes())?;

    let common = line_chart(
        "Common shock",
        "<cos theta(t)>",
        t,
        vec![("common shock".into(), report.shocks.common_shock.clone())],
    );
    write_file(dir, "common_shock.svg", render_svg(&common)?.as_bytes())?;

    let individual = line_chart(
        "Individual shocks",
        "cos theta_i - <cos theta>",
        t,
        ids.iter()
            .cloned()
            .zip(report.shocks.individual.iter().cloned())
            .collect(),
    );
    write_file(dir, "individual_shocks.svg", render_svg(&individual)?.as_bytes())?;
    Ok(())
}

/// Builds the generator configuration from command-line flags.
pub fn kuramoto_config(args: &KuramotoArgs) -> Result<KuramotoConfig> {
    if args.months < phasesync_core::panel::MIN_MONTHS {
        return Err(CliError::Invalid(format!(
            "--months must be at least {}",
            phasesync_core::panel::MIN_MONTHS
        )));
    }
    if !(args.mean_period.is_finite() && args.mean_period > 0.0) {
        return Err(CliError::Invalid("--mean-period must be positive".into()));
    }
    if !(args.freq_spread.is_finite() && args.freq_spread >= 0.0) {
        return Err(CliError::Invalid("--freq-spread must be >= 0".into()));
    }
    let mean_omega = TAU / args.mean_period;
    let mut cfg = KuramotoConfig::gaussian(
        args.sectors,
        mean_omega,
        args.freq_spread * mean_omega,
        args.coupling,
        args.months - 1,
        args.seed,
    )?
    .with_noise(args.noise)
    .with_burn_in(args.burn_in);
    cfg.common_kicks = args.kicks.clone();
    cfg.validate()?;
    Ok(cfg)
}

fn kuramoto_meta(args: &KuramotoArgs, cfg: &KuramotoConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "generator = kuramoto");
    let _ = writeln!(s, "rng = {RNG_IDENTITY}");
    let _ = writeln!(s, "seed = {}", cfg.seed);
    let _ = writeln!(s, "sectors = {}", cfg.n_oscillators);
    let _ = writeln!(s, "coupling = {}", cfg.coupling);
    let _ = writeln!(s, "mean_period = {}", args.mean_period);
    let _ = writeln!(s, "freq_spread = {}", args.freq_spread);
    let freqs: Vec<String> = cfg.natural_frequencies.iter().map(|w| w.to_string()).collect();
    let _ = writeln!(s, "natural_frequencies = {}", freqs.join(","));
    let _ = writeln!(s, "noise = {}", args.noise);
    let kicks: Vec<String> = cfg
        .common_kicks
        .iter()
        .map(|k| format!("{}:{}", k.time, k.delta))
        .collect();
    let _ = writeln!(s, "kicks = {}", kicks.join(","));
    let _ = writeln!(s, "months = {}", args.months);
    let _ = writeln!(s, "burn_in = {}", cfg.burn_in_steps);
    let _ = writeln!(s, "dt = {}", cfg.dt);
    let _ = writeln!(s, "returns = cos(theta_i(t)), levels start at 100");
    s
}

pub fn cmd_synth_kuramoto(args: &KuramotoArgs) -> Result<()> {
    let cfg = kuramoto_config(args)?;
    let out = kuramoto_panel(&cfg)?;
    prepare_out_dir(&args.out)?;
    let mut buf = Vec::new();
    write_panel_csv(&out.panel, &mut buf)?;
    write_file(&args.out, "panel.csv", &buf)?;
    write_file(&args.out, "meta.txt", kuramoto_meta(args, &cfg).as_bytes())
}

pub fn cmd_synth_slutsky(args: &SlutskyArgs) -> Result<()> {
    let series = slutsky_series(args.n, args.window, args.seed)?;
    prepare_out_dir(&args.out)?;
    let t: Vec<f64> = (0..series.len()).map(|k| k as f64).collect();
    write_file(&args.out, "series.csv", &table(&["t", "value"], &[&t, &series])?)?;
    let meta = format!(
        "generator = slutsky\nrng = {RNG_IDENTITY}\nseed = {}\nn = {}\nwindow = {}\ndraws = uniform(0,1)\n",
        args.seed, args.n, args.window
    );
    write_file(&args.out, "meta.txt", meta.as_bytes())
}
