use std::f64::consts::TAU;

use phasesync_core::preprocess::{log_returns_of, unit_root_test, Significance};
use phasesync_core::synchrony::{fit_frequency, lock_indicator};
use phasesync_core::synth::{kuramoto_panel, levels_from_returns, order_parameter, slutsky_series, KuramotoConfig};
use phasesync_core::{analyze, AnalysisConfig, BandSpec, Panel, YearMonth};
use proptest::prelude::*;

fn config(sectors: usize, spread: f64, coupling: f64, seed: u64) -> KuramotoConfig {
    let mean = TAU / 48.0;
    KuramotoConfig::gaussian(sectors, mean, spread * mean, coupling * mean, 239, seed)
        .unwrap()
        .with_burn_in(120)
}

fn lag_correlation(x: &[f64], lag: usize) -> f64 {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let var: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    (0..x.len() - lag)
        .map(|t| (x[t] - mean) * (x[t + lag] - mean))
        .sum::<f64>()
        / var
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn log_returns_invert_levels(r in prop::collection::vec(-0.2f64..0.2, 1..100), start in 0.1f64..1e4) {
        let levels = levels_from_returns(&r, start).unwrap();
        prop_assert_eq!(levels.len(), r.len() + 1);
        let back = log_returns_of(&levels);
        for (a, b) in back.iter().zip(&r) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn unit_root_statistic_ignores_level_shift(
        x in prop::collection::vec(-1.0f64..1.0, 30..120),
        shift in -100.0f64..100.0,
    ) {
        let moved: Vec<f64> = x.iter().map(|v| v + shift).collect();
        let a = unit_root_test(&x, Significance::FivePercent).unwrap();
        let b = unit_root_test(&moved, Significance::FivePercent).unwrap();
        prop_assert!((a.statistic - b.statistic).abs() < 1e-6 * (1.0 + a.statistic.abs()));
    }
}

#[test]
fn uncoupled_noiseless_oscillators_keep_their_frequencies() {
    let cfg = config(5, 0.3, 0.0, 4);
    let out = kuramoto_panel(&cfg).unwrap();
    for (phase, w) in out.phases.iter().zip(&cfg.natural_frequencies) {
        let fit = fit_frequency(phase, cfg.dt).unwrap();
        assert!((fit.omega - w).abs() < 1e-9);
    }
}

#[test]
fn strong_coupling_synchronises() {
    let out = kuramoto_panel(&config(16, 0.3, 3.0, 9)).unwrap();
    let last: Vec<f64> = out.phases.iter().map(|p| *p.last().unwrap()).collect();
    assert!(order_parameter(&last) > 0.95);
}

#[test]
fn common_kick_leaves_sigma_unchanged() {
    let cfg = config(8, 0.3, 3.0, 2);
    let calm = kuramoto_panel(&cfg).unwrap();
    let kicked = kuramoto_panel(&cfg.clone().with_kick(100.0, 1.3)).unwrap();
    let omegas = vec![TAU / 48.0; 8];
    let a = lock_indicator(&calm.phases, &omegas, 1.0).unwrap();
    let b = lock_indicator(&kicked.phases, &omegas, 1.0).unwrap();
    for (x, y) in a.sigma.iter().zip(&b.sigma) {
        assert!((x - y).abs() < 1e-9);
    }
}

#[test]
fn kuramoto_is_deterministic() {
    let cfg = config(6, 0.3, 1.0, 21).with_noise(0.05).with_kick(60.0, 0.8);
    let a = kuramoto_panel(&cfg).unwrap();
    let b = kuramoto_panel(&cfg).unwrap();
    assert_eq!(a, b);
    let c = kuramoto_panel(&config(6, 0.3, 1.0, 22).with_noise(0.05).with_kick(60.0, 0.8)).unwrap();
    assert_ne!(a.panel, c.panel);
}

#[test]
fn slutsky_sums_are_smooth() {
    let x = slutsky_series(10_000, 10, 3).unwrap();
    let r1 = lag_correlation(&x, 1);
    assert!((0.85..=0.95).contains(&r1), "{r1}");
    assert!(lag_correlation(&x, 10) < 0.1);
    assert_eq!(x, slutsky_series(10_000, 10, 3).unwrap());
}

fn in_band_panel(n_returns: usize) -> Panel {
    // Harmonics 3..=9 of a 239-sample record all have periods within 24..80.
    let cols = (0..4)
        .map(|i| {
            let r: Vec<f64> = (0..n_returns)
                .map(|t| {
                    (3..=9)
                        .map(|h| {
                            let amp = 0.01 / (1.0 + (h as f64 - 5.0 - 0.3 * i as f64).powi(2));
                            amp * (TAU * (h * t) as f64 / n_returns as f64 + 0.7 * i as f64).cos()
                        })
                        .sum()
                })
                .collect();
            levels_from_returns(&r, 100.0).unwrap()
        })
        .collect();
    let ids = (0..4).map(|i| format!("s{i}")).collect();
    Panel::new(ids, YearMonth::new(1990, 1).unwrap().sequence(n_returns + 1), cols).unwrap()
}

#[test]
fn widening_band_without_new_content_keeps_frequencies() {
    let panel = in_band_panel(239);
    let narrow = analyze(&panel, &AnalysisConfig::default()).unwrap();
    let wide_cfg = AnalysisConfig {
        band: BandSpec::new(18.0, 80.0).unwrap(),
        ..AnalysisConfig::default()
    };
    let wide = analyze(&panel, &wide_cfg).unwrap();
    for (a, b) in narrow.fits.iter().zip(&wide.fits) {
        assert!((a.omega - b.omega).abs() < 1e-9);
    }
}

#[test]
fn analysis_is_deterministic_and_ordered() {
    let out = kuramoto_panel(&config(5, 0.3, 3.0, 12)).unwrap();
    let cfg = AnalysisConfig::default();
    let a = analyze(&out.panel, &cfg).unwrap();
    assert_eq!(a, analyze(&out.panel, &cfg).unwrap());
    assert_eq!(a.sector_ids, out.panel.sector_ids());

    // Reversing the columns reverses every per-sector output.
    let ids: Vec<String> = out.panel.sector_ids().iter().rev().cloned().collect();
    let cols: Vec<Vec<f64>> = out.panel.columns().iter().rev().cloned().collect();
    let reversed = Panel::new(ids, out.panel.dates().to_vec(), cols).unwrap();
    let b = analyze(&reversed, &cfg).unwrap();
    let fa: Vec<f64> = a.fits.iter().map(|f| f.omega).collect();
    let mut fb: Vec<f64> = b.fits.iter().map(|f| f.omega).collect();
    fb.reverse();
    assert_eq!(fa, fb);
    for (x, y) in a.lock.sigma.iter().zip(&b.lock.sigma) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn synchronised_panel_is_detected() {
    let out = kuramoto_panel(&config(16, 0.3, 3.0, 1)).unwrap();
    let report = analyze(&out.panel, &AnalysisConfig::default()).unwrap();
    assert!(report.entrainment.unwrap().relative_spread < 0.05);
    assert!(report.lock_summary.is_partially_locked);
    assert_eq!(report.dates.len(), 239);
}

#[test]
fn widely_spread_uncoupled_panel_is_not_locked() {
    let out = kuramoto_panel(&config(16, 0.5, 0.0, 1)).unwrap();
    let report = analyze(&out.panel, &AnalysisConfig::default()).unwrap();
    assert!(report.entrainment.unwrap().relative_spread > 0.15);
    assert!(!report.lock_summary.is_partially_locked);
}
