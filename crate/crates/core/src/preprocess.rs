//! Stationarization: log-returns of index levels and a Dickey-Fuller unit-root check.

use std::fmt;

use crate::error::{Error, Result};
use crate::panel::{Panel, YearMonth};

/// Month-on-month log-returns of a [`Panel`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnPanel {
    sector_ids: Vec<String>,
    /// Later month of each differenced pair.
    dates: Vec<YearMonth>,
    returns: Vec<Vec<f64>>,
}

impl ReturnPanel {
    pub fn sector_ids(&self) -> &[String] {
        &self.sector_ids
    }

    pub fn dates(&self) -> &[YearMonth] {
        &self.dates
    }

    pub fn n_sectors(&self) -> usize {
        self.sector_ids.len()
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn sector(&self, i: usize) -> &[f64] {
        &self.returns[i]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.returns
    }
}

/// `returns[t] = ln(levels[t+1]) - ln(levels[t])` for every sector.
pub fn log_returns(panel: &Panel) -> ReturnPanel {
    let returns = panel.columns().iter().map(|levels| log_returns_of(levels)).collect();
    ReturnPanel {
        sector_ids: panel.sector_ids().to_vec(),
        dates: panel.dates()[1..].to_vec(),
        returns,
    }
}

/// Log-returns of a single positive series.
pub fn log_returns_of(levels: &[f64]) -> Vec<f64> {
    levels.windows(2).map(|w| w[1].ln() - w[0].ln()).collect()
}

/// Significance level of the unit-root test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Significance {
    OnePercent,
    #[default]
    FivePercent,
    TenPercent,
}

impl Significance {
    pub fn level(self) -> f64 {
        match self {
            Significance::OnePercent => 0.01,
            Significance::FivePercent => 0.05,
            Significance::TenPercent => 0.10,
        }
    }

    /// Large-sample Dickey-Fuller critical value, regression with intercept and no trend.
    pub fn critical_value(self) -> f64 {
        match self {
            Significance::OnePercent => -3.43,
            Significance::FivePercent => -2.86,
            Significance::TenPercent => -2.57,
        }
    }
}

impl TryFrom<f64> for Significance {
    type Error = Error;

    fn try_from(level: f64) -> Result<Self> {
        [
            Significance::OnePercent,
            Significance::FivePercent,
            Significance::TenPercent,
        ]
        .into_iter()
        .find(|s| (s.level() - level).abs() < 1e-12)
        .ok_or_else(|| Error::InvalidArgument(format!("significance {level} is not one of 0.01, 0.05, 0.10")))
    }
}

impl fmt::Display for Significance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.level())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitRootResult {
    /// t-ratio of the lagged-level coefficient.
    pub statistic: f64,
    pub critical_value: f64,
    pub significance: Significance,
    /// `statistic < critical_value`: the series looks stationary.
    pub reject_unit_root: bool,
}

/// Shortest series accepted by [`unit_root_test`].
pub const MIN_UNIT_ROOT_LEN: usize = 25;

/// Non-augmented Dickey-Fuller test with intercept.
///
/// Fits `dx[t] = c + rho * x[t-1] + e[t]` by least squares and compares
/// `rho / se(rho)` against the asymptotic critical value.
pub fn unit_root_test(series: &[f64], significance: Significance) -> Result<UnitRootResult> {
    if series.len() < MIN_UNIT_ROOT_LEN {
        return Err(Error::TooShort {
            required: MIN_UNIT_ROOT_LEN,
            actual: series.len(),
        });
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("series contains non-finite values".into()));
    }

    let lagged = &series[..series.len() - 1];
    let diffs: Vec<f64> = series.windows(2).map(|w| w[1] - w[0]).collect();
    let m = diffs.len() as f64;

    let mean_x = lagged.iter().sum::<f64>() / m;
    let mean_d = diffs.iter().sum::<f64>() / m;
    let (mut sxx, mut sxd) = (0.0, 0.0);
    for (x, d) in lagged.iter().zip(&diffs) {
        let cx = x - mean_x;
        sxx += cx * cx;
        sxd += cx * (d - mean_d);
    }
    let scale = lagged
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    if sxx <= 1e-24 * scale * scale * m {
        return Err(Error::Degenerate("lagged series has zero variance".into()));
    }

    let rho = sxd / sxx;
    let ssr: f64 = lagged
        .iter()
        .zip(&diffs)
        .map(|(x, d)| {
            let e = (d - mean_d) - rho * (x - mean_x);
            e * e
        })
        .sum();
    let energy: f64 = diffs.iter().map(|d| d * d).sum::<f64>() + rho * rho * sxx;
    if ssr <= 1e-20 * energy {
        return Err(Error::Degenerate("regression residuals vanish".into()));
    }

    let sigma2 = ssr / (m - 2.0);
    let statistic = rho / (sigma2 / sxx).sqrt();
    let critical_value = significance.critical_value();
    Ok(UnitRootResult {
        statistic,
        critical_value,
        significance,
        reject_unit_root: statistic < critical_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::panel::YearMonth;

    fn panel(levels: Vec<f64>) -> Panel {
        let dates = YearMonth::new(2000, 1).unwrap().sequence(levels.len());
        Panel::new(vec!["s".into()], dates, vec![levels]).unwrap()
    }

    #[test]
    fn constant_levels_give_zero_returns() {
        let r = log_returns(&panel(vec![100.0; 4]));
        assert_eq!(r.sector(0), &[0.0, 0.0, 0.0]);
        assert_eq!(r.len(), 3);
        assert_eq!(r.dates()[0].to_string(), "2000-02");
    }

    #[test]
    fn doubling_levels() {
        let r = log_returns(&panel(vec![1.0, 2.0, 4.0, 8.0]));
        for v in r.sector(0) {
            assert!((v - std::f64::consts::LN_2).abs() < 1e-15);
        }
    }

    #[test]
    fn exponential_levels() {
        let r = log_returns_of(&[100.0, 100.0 * 0.01f64.exp(), 100.0 * 0.03f64.exp()]);
        assert!((r[0] - 0.01).abs() < 1e-12);
        assert!((r[1] - 0.02).abs() < 1e-12);
    }

    #[test]
    fn short_series_rejected() {
        let err = unit_root_test(&[1.0; 24], Significance::FivePercent).unwrap_err();
        assert!(matches!(
            err,
            Error::TooShort {
                required: 25,
                actual: 24
            }
        ));
    }

    #[test]
    fn constant_series_is_degenerate() {
        assert!(matches!(
            unit_root_test(&[3.0; 50], Significance::FivePercent),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn linear_series_is_degenerate() {
        let x: Vec<f64> = (1..=60).map(f64::from).collect();
        assert!(matches!(
            unit_root_test(&x, Significance::FivePercent),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn decision_matches_statistic() {
        // Strongly mean-reverting alternating series.
        let x: Vec<f64> = (0..100)
            .map(|t| if t % 2 == 0 { 1.0 } else { -1.0 } + 0.01 * (t as f64).sin())
            .collect();
        for sig in [
            Significance::OnePercent,
            Significance::FivePercent,
            Significance::TenPercent,
        ] {
            let r = unit_root_test(&x, sig).unwrap();
            assert_eq!(r.reject_unit_root, r.statistic < r.critical_value);
            assert!(r.reject_unit_root);
        }
    }

    #[test]
    fn significance_from_level() {
        assert_eq!(Significance::try_from(0.05).unwrap(), Significance::FivePercent);
        assert_eq!(Significance::try_from(0.01).unwrap().critical_value(), -3.43);
        assert_eq!(Significance::try_from(0.1).unwrap().critical_value(), -2.57);
        assert!(Significance::try_from(0.2).is_err());
    }
}
