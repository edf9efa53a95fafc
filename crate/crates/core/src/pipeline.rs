//! End-to-end analysis of a panel.
//!
//! Levels are turned into log-returns, each sector is checked for a unit root,
//! band-passed and paired with its Hilbert transform. The resulting phases feed
//! the frequency fits, the lock indicator and the shock decomposition.

use sha2::{Digest, Sha256};

use crate::analytic::{analytic, bandpass, fourier_forward, hilbert, reconstruct, AnalyticSeries};
use crate::error::{Error, Result};
use crate::io::write_panel_csv;
use crate::panel::{BandSpec, Panel, YearMonth};
use crate::preprocess::{log_returns, unit_root_test, Significance, UnitRootResult};
use crate::shocks::{decompose, ShockDecomposition};
use crate::synchrony::{
    entrainment_spread, fit_frequency, lock_indicator, partial_lock_summary, EntrainmentSummary, FrequencyFit,
    LockTrace, PartialLockSummary, DEFAULT_LOCK_FRACTION, DEFAULT_LOCK_THRESHOLD,
};

/// Months between consecutive samples.
const DT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisConfig {
    pub band: BandSpec,
    pub significance: Significance,
    /// `lock_ratio` below which a sample counts as locked.
    pub lock_threshold: f64,
    /// Share of locked samples needed for partial phase locking.
    pub lock_fraction: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            band: BandSpec::default(),
            significance: Significance::FivePercent,
            lock_threshold: DEFAULT_LOCK_THRESHOLD,
            lock_fraction: DEFAULT_LOCK_FRACTION,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lock_threshold.is_finite() && self.lock_threshold > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "lock threshold {} must be positive",
                self.lock_threshold
            )));
        }
        if !(0.0..=1.0).contains(&self.lock_fraction) {
            return Err(Error::InvalidArgument(format!(
                "lock fraction {} outside [0, 1]",
                self.lock_fraction
            )));
        }
        Ok(())
    }
}

/// Outcome of the per-sector stationarity check. The check is advisory: a
/// sector that cannot be tested is reported, not fatal.
#[derive(Debug, Clone, PartialEq)]
pub enum StationarityCheck {
    Tested(UnitRootResult),
    Untestable(String),
}

impl StationarityCheck {
    pub fn passed(&self) -> bool {
        matches!(self, StationarityCheck::Tested(r) if r.reject_unit_root)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    /// SHA-256 of the panel in canonical CSV form.
    pub input_digest: String,
    pub config: AnalysisConfig,
    pub n_sectors: usize,
    pub n_months: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub sector_ids: Vec<String>,
    /// Dates of the return samples (later month of each pair).
    pub dates: Vec<YearMonth>,
    pub stationarity: Vec<StationarityCheck>,
    pub analytic: Vec<AnalyticSeries>,
    pub fits: Vec<FrequencyFit>,
    /// `None` for a single-sector panel.
    pub entrainment: Option<EntrainmentSummary>,
    pub lock: LockTrace,
    pub lock_summary: PartialLockSummary,
    pub shocks: ShockDecomposition,
    pub warnings: Vec<String>,
    pub provenance: Provenance,
}

pub fn panel_digest(panel: &Panel) -> Result<String> {
    let mut buf = Vec::new();
    write_panel_csv(panel, &mut buf)?;
    Ok(hex::encode(Sha256::digest(&buf)))
}

/// Runs the full analysis. Every per-sector section of the report follows the
/// panel's column order.
pub fn analyze(panel: &Panel, cfg: &AnalysisConfig) -> Result<AnalysisReport> {
    cfg.validate()?;
    let returns = log_returns(panel);
    let len = returns.len();
    cfg.band.validate_for(len)?;

    let mut warnings = Vec::new();
    let mut stationarity = Vec::with_capacity(panel.n_sectors());
    let mut analytic_series = Vec::with_capacity(panel.n_sectors());
    let mut fits = Vec::with_capacity(panel.n_sectors());

    for (id, series) in returns.sector_ids().iter().zip(returns.columns()) {
        let check = match unit_root_test(series, cfg.significance) {
            Ok(r) => {
                if !r.reject_unit_root {
                    warnings.push(format!(
                        "sector {id}: unit root not rejected at {} (statistic {:.3}, critical {:.2})",
                        cfg.significance, r.statistic, r.critical_value
                    ));
                }
                StationarityCheck::Tested(r)
            }
            Err(e) => {
                warnings.push(format!("sector {id}: stationarity not tested: {e}"));
                StationarityCheck::Untestable(e.to_string())
            }
        };
        stationarity.push(check);

        let filtered = bandpass(&fourier_forward(series)?, &cfg.band)?;
        let a = analytic(&reconstruct(&filtered), &hilbert(&filtered))
            .map_err(|e| Error::Degenerate(format!("sector {id}: {e}")))?;
        fits.push(fit_frequency(&a.phase_unwrapped, DT)?);
        analytic_series.push(a);
    }

    let entrainment = if fits.len() >= 2 {
        Some(entrainment_spread(&fits)?)
    } else {
        warnings.push("single sector: entrainment undefined and sigma(t) is identically zero".into());
        None
    };

    let phases: Vec<Vec<f64>> = analytic_series.iter().map(|a| a.phase_unwrapped.clone()).collect();
    let omegas: Vec<f64> = fits.iter().map(|f| f.omega).collect();
    let lock = lock_indicator(&phases, &omegas, DT)?;
    let lock_summary = partial_lock_summary(&lock, cfg.lock_threshold, cfg.lock_fraction)?;
    let shocks = decompose(&analytic_series, DT)?;

    Ok(AnalysisReport {
        sector_ids: returns.sector_ids().to_vec(),
        dates: returns.dates().to_vec(),
        stationarity,
        analytic: analytic_series,
        fits,
        entrainment,
        lock,
        lock_summary,
        shocks,
        warnings,
        provenance: Provenance {
            input_digest: panel_digest(panel)?,
            config: *cfg,
            n_sectors: panel.n_sectors(),
            n_months: panel.n_months(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::levels_from_returns;
    use std::f64::consts::TAU;

    fn harmonic_panel(harmonics: &[(usize, f64)], n_returns: usize) -> Panel {
        let cols = harmonics
            .iter()
            .map(|&(n, offset)| {
                let r: Vec<f64> = (0..n_returns)
                    .map(|t| 0.01 * (TAU * (n * t) as f64 / n_returns as f64 + offset).cos())
                    .collect();
                levels_from_returns(&r, 100.0).unwrap()
            })
            .collect();
        let ids = (0..harmonics.len()).map(|i| format!("s{i}")).collect();
        Panel::new(ids, YearMonth::new(1988, 1).unwrap().sequence(n_returns + 1), cols).unwrap()
    }

    #[test]
    fn pure_harmonic_slope() {
        let report = analyze(&harmonic_panel(&[(5, 0.3), (5, 1.1)], 240), &AnalysisConfig::default()).unwrap();
        for f in &report.fits {
            assert!((f.omega - TAU * 5.0 / 240.0).abs() < 1e-6);
        }
        assert_eq!(report.dates.len(), 240);
        assert!(report.lock.sigma.iter().all(|s| s.abs() < 1e-9));
        assert!(report.lock_summary.is_partially_locked);
    }

    #[test]
    fn single_sector_warns() {
        let report = analyze(&harmonic_panel(&[(4, 0.0)], 240), &AnalysisConfig::default()).unwrap();
        assert!(report.entrainment.is_none());
        assert!(report.lock.sigma.iter().all(|s| *s == 0.0));
        assert!(report.warnings.iter().any(|w| w.contains("single sector")));
    }

    #[test]
    fn band_longer_than_record_rejected() {
        let err = analyze(&harmonic_panel(&[(2, 0.0)], 60), &AnalysisConfig::default()).unwrap_err();
        assert!(matches!(err, Error::InvalidBand(_)));
    }

    #[test]
    fn short_panel_reports_untestable_stationarity() {
        let cfg = AnalysisConfig {
            band: BandSpec::new(4.0, 12.0).unwrap(),
            ..AnalysisConfig::default()
        };
        let report = analyze(&harmonic_panel(&[(2, 0.0), (2, 0.5)], 12), &cfg).unwrap();
        assert!(matches!(report.stationarity[0], StationarityCheck::Untestable(_)));
        assert!(report.warnings.iter().any(|w| w.contains("not tested")));
    }

    #[test]
    fn config_validation() {
        let panel = harmonic_panel(&[(5, 0.0)], 240);
        let bad = AnalysisConfig {
            lock_threshold: 0.0,
            ..AnalysisConfig::default()
        };
        assert!(analyze(&panel, &bad).is_err());
        let bad = AnalysisConfig {
            lock_fraction: 2.0,
            ..AnalysisConfig::default()
        };
        assert!(analyze(&panel, &bad).is_err());
    }

    #[test]
    fn digest_tracks_content() {
        let a = harmonic_panel(&[(5, 0.0)], 40);
        let b = harmonic_panel(&[(5, 0.1)], 40);
        assert_eq!(panel_digest(&a).unwrap(), panel_digest(&a.clone()).unwrap());
        assert_ne!(panel_digest(&a).unwrap(), panel_digest(&b).unwrap());
        assert_eq!(panel_digest(&a).unwrap().len(), 64);
    }
}
