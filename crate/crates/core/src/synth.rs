//! Synthetic ground truth: moving sums of uniform noise, mean-field coupled
//! phase oscillators emitted as index-level panels, and growth accounting helpers.
//!
//! Every generator draws from [`rand_chacha::ChaCha8Rng`] seeded with
//! `seed_from_u64`, so output is reproducible across platforms for a given seed.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::error::{Error, Result};
use crate::panel::{Panel, YearMonth};

/// Name of the generator behind every seeded draw in this module.
pub const RNG_IDENTITY: &str = "rand_chacha::ChaCha8Rng (rand_chacha 0.9), seeded via SeedableRng::seed_from_u64";

/// Default moving-sum window.
pub const DEFAULT_SLUTSKY_WINDOW: usize = 10;

/// Level every synthetic sector starts from.
pub const SYNTHETIC_BASE_LEVEL: f64 = 100.0;

/// Largest accepted `max |omega_i| * dt`.
pub const MAX_PHASE_STEP: f64 = 0.5;

/// Stream for the simulation itself; natural frequencies come from stream 1.
const SIMULATION_STREAM: u64 = 0;
const FREQUENCY_STREAM: u64 = 1;

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Moving sums of `window` consecutive uniform(0, 1) draws.
///
/// Draws `n + window - 1` variates; `output[t]` sums draws `t..t + window`.
pub fn slutsky_series(n: usize, window: usize, seed: u64) -> Result<Vec<f64>> {
    if window == 0 || n < window {
        return Err(Error::InvalidArgument(format!(
            "need n >= window >= 1, got n = {n}, window = {window}"
        )));
    }
    let mut r = rng(seed, SIMULATION_STREAM);
    let draws: Vec<f64> = (0..n + window - 1).map(|_| r.random::<f64>()).collect();
    Ok(draws.windows(window).map(|w| w.iter().sum()).collect())
}

/// A phase shift applied to every oscillator at once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommonKick {
    /// Months from the start of the run.
    pub time: f64,
    /// Radians.
    pub delta: f64,
}

/// Mean-field coupled phase oscillators with idiosyncratic noise and common kicks:
///
/// ```text
/// d theta_i = [omega_i + (K / S) sum_j sin(theta_j - theta_i)] dt + noise_i sqrt(dt) xi
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct KuramotoConfig {
    pub n_oscillators: usize,
    /// `K`, radians per month.
    pub coupling: f64,
    /// Radians per month, one per oscillator.
    pub natural_frequencies: Vec<f64>,
    /// Radians per square-root month, one per oscillator.
    pub noise_std: Vec<f64>,
    pub common_kicks: Vec<CommonKick>,
    /// Starting phases; drawn uniformly on the circle when `None`.
    pub initial_phases: Option<Vec<f64>>,
    /// Integration step in months. Each step becomes one panel row, so `1.0`
    /// yields a monthly panel.
    pub dt: f64,
    pub n_steps: usize,
    /// Steps integrated before the first recorded sample. Kicks are timed from
    /// the end of the burn-in.
    pub burn_in_steps: usize,
    pub seed: u64,
    /// Month of the first panel row.
    pub start: YearMonth,
}

impl KuramotoConfig {
    /// Gaussian natural frequencies `N(mean_omega, std_omega^2)`, drawn from a
    /// stream of `seed` separate from the simulation noise. Noise-free, no
    /// kicks, monthly steps, random initial phases.
    pub fn gaussian(
        n_oscillators: usize,
        mean_omega: f64,
        std_omega: f64,
        coupling: f64,
        n_steps: usize,
        seed: u64,
    ) -> Result<Self> {
        if !(std_omega.is_finite() && std_omega >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "frequency spread {std_omega} must be >= 0"
            )));
        }
        let normal = Normal::new(mean_omega, std_omega)
            .map_err(|e| Error::InvalidArgument(format!("frequency distribution: {e}")))?;
        let mut r = rng(seed, FREQUENCY_STREAM);
        Ok(Self {
            n_oscillators,
            coupling,
            natural_frequencies: (0..n_oscillators).map(|_| normal.sample(&mut r)).collect(),
            noise_std: vec![0.0; n_oscillators],
            common_kicks: Vec::new(),
            initial_phases: None,
            dt: 1.0,
            n_steps,
            burn_in_steps: 0,
            seed,
            start: YearMonth::new(1988, 1).expect("valid month"),
        })
    }

    pub fn with_noise(mut self, noise_std: f64) -> Self {
        self.noise_std = vec![noise_std; self.n_oscillators];
        self
    }

    pub fn with_burn_in(mut self, steps: usize) -> Self {
        self.burn_in_steps = steps;
        self
    }

    pub fn with_kick(mut self, time: f64, delta: f64) -> Self {
        self.common_kicks.push(CommonKick { time, delta });
        self
    }

    pub fn validate(&self) -> Result<()> {
        let s = self.n_oscillators;
        if s == 0 {
            return Err(Error::InvalidArgument("need at least one oscillator".into()));
        }
        if self.natural_frequencies.len() != s || self.noise_std.len() != s {
            return Err(Error::LengthMismatch(format!(
                "{s} oscillators, {} natural frequencies, {} noise levels",
                self.natural_frequencies.len(),
                self.noise_std.len()
            )));
        }
        if let Some(p) = &self.initial_phases {
            if p.len() != s || p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(format!("need {s} finite initial phases")));
            }
        }
        if !(self.coupling.is_finite() && self.coupling >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "coupling {} must be >= 0",
                self.coupling
            )));
        }
        if self.natural_frequencies.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidArgument("natural frequencies must be finite".into()));
        }
        if self.noise_std.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidArgument("noise levels must be finite and >= 0".into()));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidArgument(format!("dt {} must be positive", self.dt)));
        }
        let fastest = self.natural_frequencies.iter().fold(0.0_f64, |m, w| m.max(w.abs()));
        if fastest * self.dt >= MAX_PHASE_STEP {
            return Err(Error::InvalidArgument(format!(
                "step too coarse: max |omega| * dt = {} must stay below {MAX_PHASE_STEP} rad",
                fastest * self.dt
            )));
        }
        if self.n_steps + 1 < crate::panel::MIN_MONTHS {
            return Err(Error::InvalidArgument(format!(
                "{} steps give fewer than {} panel rows",
                self.n_steps,
                crate::panel::MIN_MONTHS
            )));
        }
        let horizon = self.n_steps as f64 * self.dt;
        for k in &self.common_kicks {
            if !(k.time.is_finite() && k.delta.is_finite() && (0.0..=horizon).contains(&k.time)) {
                return Err(Error::InvalidArgument(format!(
                    "kick at {} (delta {}) outside run [0, {horizon}]",
                    k.time, k.delta
                )));
            }
        }
        Ok(())
    }

    /// Step index at which a kick lands: the first grid time at or after it.
    fn kick_step(&self, kick: &CommonKick) -> usize {
        ((kick.time / self.dt) - 1e-9).ceil().max(0.0) as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KuramotoOutput {
    /// Unwrapped phases per oscillator at steps `0..=n_steps`.
    pub phases: Vec<Vec<f64>>,
    /// `cos theta_i` at steps `1..=n_steps`; the log-returns of `panel`.
    pub returns: Vec<Vec<f64>>,
    /// `n_steps + 1` rows starting at [`SYNTHETIC_BASE_LEVEL`].
    pub panel: Panel,
}

/// One Euler-Maruyama step of every oscillator, followed by a common phase shift.
fn euler_step(cfg: &KuramotoConfig, theta: &mut [f64], xi: &mut [f64], r: &mut ChaCha8Rng, kick: f64) {
    let inv_s = 1.0 / theta.len() as f64;
    let (mut zx, mut zy) = (0.0, 0.0);
    for p in theta.iter() {
        zx += p.cos();
        zy += p.sin();
    }
    zx *= inv_s;
    zy *= inv_s;
    for v in xi.iter_mut() {
        *v = StandardNormal.sample(r);
    }
    let sqrt_dt = cfg.dt.sqrt();
    for (i, p) in theta.iter_mut().enumerate() {
        // (K / S) sum_j sin(theta_j - theta_i) = K Im(Z exp(-i theta_i)).
        let (sin_i, cos_i) = p.sin_cos();
        let pull = cfg.coupling * (zy * cos_i - zx * sin_i);
        *p += (cfg.natural_frequencies[i] + pull) * cfg.dt + cfg.noise_std[i] * sqrt_dt * xi[i] + kick;
    }
}

/// Integrates the oscillators by Euler-Maruyama and emits the phases plus a
/// level panel whose log-returns are `cos theta_i(t)`.
pub fn kuramoto_panel(cfg: &KuramotoConfig) -> Result<KuramotoOutput> {
    cfg.validate()?;
    let s = cfg.n_oscillators;
    let mut r = rng(cfg.seed, SIMULATION_STREAM);

    let mut theta: Vec<f64> = match &cfg.initial_phases {
        Some(p) => p.clone(),
        None => (0..s).map(|_| r.random::<f64>() * TAU).collect(),
    };
    let mut kicks_at = vec![0.0; cfg.n_steps + 1];
    for k in &cfg.common_kicks {
        kicks_at[cfg.kick_step(k)] += k.delta;
    }
    let mut xi = vec![0.0; s];
    for _ in 0..cfg.burn_in_steps {
        euler_step(cfg, &mut theta, &mut xi, &mut r, 0.0);
    }
    if kicks_at[0] != 0.0 {
        theta.iter_mut().for_each(|p| *p += kicks_at[0]);
    }

    let mut phases: Vec<Vec<f64>> = theta
        .iter()
        .map(|&p| {
            let mut v = Vec::with_capacity(cfg.n_steps + 1);
            v.push(p);
            v
        })
        .collect();
    for &kick in kicks_at.iter().skip(1) {
        euler_step(cfg, &mut theta, &mut xi, &mut r, kick);
        for (trajectory, p) in phases.iter_mut().zip(&theta) {
            trajectory.push(*p);
        }
    }

    let returns: Vec<Vec<f64>> = phases
        .iter()
        .map(|p| p[1..].iter().map(|v| v.cos()).collect())
        .collect();
    let levels = returns
        .iter()
        .map(|r| levels_from_returns(r, SYNTHETIC_BASE_LEVEL))
        .collect::<Result<Vec<_>>>()?;
    let ids = (1..=s).map(|i| format!("s{i}")).collect();
    let panel = Panel::new(ids, cfg.start.sequence(cfg.n_steps + 1), levels)?;
    Ok(KuramotoOutput { phases, returns, panel })
}

/// Modulus of the mean unit phasor, in `[0, 1]`.
pub fn order_parameter(phases: &[f64]) -> f64 {
    if phases.is_empty() {
        return 0.0;
    }
    let (c, s) = phases.iter().fold((0.0, 0.0), |(c, s), p| (c + p.cos(), s + p.sin()));
    let n = phases.len() as f64;
    ((c / n).hypot(s / n)).min(1.0)
}

/// Technology growth left after capital and labour contributions:
/// `dY - alpha dK - (1 - alpha) dL`, elementwise.
pub fn solow_residual(d_output: &[f64], d_capital: &[f64], d_labour: &[f64], alpha: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("capital share {alpha} outside [0, 1]")));
    }
    if d_capital.len() != d_output.len() || d_labour.len() != d_output.len() {
        return Err(Error::LengthMismatch(format!(
            "output {}, capital {}, labour {}",
            d_output.len(),
            d_capital.len(),
            d_labour.len()
        )));
    }
    Ok(d_output
        .iter()
        .zip(d_capital)
        .zip(d_labour)
        .map(|((y, k), l)| y - alpha * k - (1.0 - alpha) * l)
        .collect())
}

/// `levels[0] = initial_level`, `levels[t + 1] = levels[t] * exp(returns[t])`.
pub fn levels_from_returns(returns: &[f64], initial_level: f64) -> Result<Vec<f64>> {
    if !(initial_level.is_finite() && initial_level > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "initial level {initial_level} must be positive"
        )));
    }
    if returns.iter().any(|r| !r.is_finite()) {
        return Err(Error::InvalidArgument("returns must be finite".into()));
    }
    let mut levels = Vec::with_capacity(returns.len() + 1);
    levels.push(initial_level);
    let mut cur = initial_level;
    for r in returns {
        cur *= r.exp();
        levels.push(cur);
    }
    Ok(levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn identity_window_returns_raw_draws() {
        let x = slutsky_series(50, 1, 3).unwrap();
        let mut r = rng(3, SIMULATION_STREAM);
        let raw: Vec<f64> = (0..50).map(|_| r.random::<f64>()).collect();
        assert_eq!(x, raw);
    }

    #[test]
    fn slutsky_is_deterministic_and_bounded() {
        let a = slutsky_series(500, 10, 7).unwrap();
        assert_eq!(a, slutsky_series(500, 10, 7).unwrap());
        assert_ne!(a, slutsky_series(500, 10, 8).unwrap());
        assert!(a.iter().all(|v| (0.0..=10.0).contains(v)));
        assert!(slutsky_series(5, 6, 1).is_err());
        assert!(slutsky_series(5, 0, 1).is_err());
    }

    fn free_config(omega: f64, s: usize) -> KuramotoConfig {
        KuramotoConfig {
            n_oscillators: s,
            coupling: 0.0,
            natural_frequencies: vec![omega; s],
            noise_std: vec![0.0; s],
            common_kicks: vec![],
            initial_phases: Some((0..s).map(|i| 0.4 * i as f64).collect()),
            dt: 1.0,
            n_steps: 100,
            burn_in_steps: 0,
            seed: 1,
            start: YearMonth::new(1988, 1).unwrap(),
        }
    }

    #[test]
    fn free_rotation() {
        let out = kuramoto_panel(&free_config(0.1, 3)).unwrap();
        for (i, p) in out.phases.iter().enumerate() {
            for (t, v) in p.iter().enumerate() {
                assert!((v - (0.4 * i as f64 + 0.1 * t as f64)).abs() < 1e-12);
            }
        }
        assert_eq!(out.panel.n_months(), 101);
        assert_eq!(out.panel.n_sectors(), 3);
        assert_eq!(out.panel.level(0, 2), SYNTHETIC_BASE_LEVEL);
    }

    #[test]
    fn identical_oscillators_stay_identical() {
        let mut cfg = free_config(0.12, 5);
        cfg.coupling = 2.0;
        cfg.initial_phases = Some(vec![0.3; 5]);
        let out = kuramoto_panel(&cfg).unwrap();
        for p in &out.phases[1..] {
            assert_eq!(p, &out.phases[0]);
        }
    }

    #[test]
    fn kick_shifts_every_phase() {
        let base = free_config(0.1, 3);
        let kicked = base.clone().with_kick(40.0, 1.5);
        let a = kuramoto_panel(&base).unwrap();
        let b = kuramoto_panel(&kicked).unwrap();
        for i in 0..3 {
            for t in 0..=100 {
                let shift = if t >= 40 { 1.5 } else { 0.0 };
                assert!((b.phases[i][t] - a.phases[i][t] - shift).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn kick_between_steps_lands_on_next_step() {
        let mut cfg = free_config(0.1, 1).with_kick(10.2, 1.0);
        cfg.dt = 0.5;
        assert_eq!(cfg.kick_step(&cfg.common_kicks[0]), 21);
        let exact = CommonKick { time: 10.0, delta: 1.0 };
        assert_eq!(cfg.kick_step(&exact), 20);
    }

    #[test]
    fn config_validation() {
        let good = free_config(0.1, 2);
        assert!(good.validate().is_ok());
        let mut c = good.clone();
        c.dt = 10.0;
        assert!(c.validate().is_err());
        let mut c = good.clone();
        c.n_oscillators = 0;
        c.natural_frequencies.clear();
        c.noise_std.clear();
        c.initial_phases = None;
        assert!(c.validate().is_err());
        let mut c = good.clone();
        c.coupling = -1.0;
        assert!(c.validate().is_err());
        let mut c = good.clone();
        c.noise_std = vec![0.1];
        assert!(c.validate().is_err());
        assert!(good.clone().with_kick(500.0, 1.0).validate().is_err());
        let mut c = good;
        c.n_steps = 2;
        assert!(c.validate().is_err());
    }

    #[test]
    fn panel_log_returns_are_cosines() {
        let out = kuramoto_panel(
            &KuramotoConfig::gaussian(4, 0.13, 0.02, 0.5, 60, 9)
                .unwrap()
                .with_noise(0.05),
        )
        .unwrap();
        let r = crate::preprocess::log_returns(&out.panel);
        for i in 0..4 {
            for (a, b) in r.sector(i).iter().zip(&out.returns[i]) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gaussian_config_is_seeded() {
        let a = KuramotoConfig::gaussian(8, 0.13, 0.04, 0.4, 100, 5).unwrap();
        let b = KuramotoConfig::gaussian(8, 0.13, 0.04, 0.4, 100, 5).unwrap();
        let c = KuramotoConfig::gaussian(8, 0.13, 0.04, 0.4, 100, 6).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.natural_frequencies, c.natural_frequencies);
        assert!(KuramotoConfig::gaussian(8, 0.13, -1.0, 0.4, 100, 5).is_err());
    }

    #[test]
    fn order_parameter_geometry() {
        assert!((order_parameter(&[0.7; 5]) - 1.0).abs() < 1e-15);
        assert!(order_parameter(&[0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2]) < 1e-15);
        assert!((order_parameter(&[0.0, FRAC_PI_2]) - (PI / 4.0).cos()).abs() < 1e-15);
    }

    #[test]
    fn solow_cases() {
        assert_eq!(solow_residual(&[0.0], &[0.0], &[0.0], 0.3).unwrap(), vec![0.0]);
        assert_eq!(
            solow_residual(&[0.05], &[0.02], &[0.01], 1.0).unwrap(),
            vec![0.05 - 0.02]
        );
        let r = solow_residual(&[0.05], &[0.02], &[0.01], 0.3).unwrap();
        assert!((r[0] - 0.037).abs() < 1e-15);
        assert!(solow_residual(&[0.05], &[0.02], &[0.01], 1.2).is_err());
        assert!(solow_residual(&[0.05, 0.1], &[0.02], &[0.01], 0.3).is_err());
    }

    #[test]
    fn levels_from_returns_cases() {
        assert_eq!(levels_from_returns(&[0.0; 3], 100.0).unwrap(), vec![100.0; 4]);
        let l = levels_from_returns(&[std::f64::consts::LN_2; 2], 1.0).unwrap();
        assert!((l[1] - 2.0).abs() < 1e-15 && (l[2] - 4.0).abs() < 1e-14);
        assert!(levels_from_returns(&[0.0], 0.0).is_err());
        assert!(levels_from_returns(&[f64::NAN], 1.0).is_err());
    }
}
