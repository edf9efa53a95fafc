//! Panel of sector index levels on a shared monthly grid, and the period band
//! used to select Fourier components.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Minimum number of monthly observations in a panel.
pub const MIN_MONTHS: usize = 4;

/// A calendar month, rendered and parsed as `YYYY-MM`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct YearMonth {
    year: i32,
    month: u8,
}

impl YearMonth {
    pub fn new(year: i32, month: u8) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::InvalidArgument(format!("month {month} out of range 1..=12")));
        }
        if !(0..=9999).contains(&year) {
            return Err(Error::InvalidArgument(format!("year {year} out of range 0..=9999")));
        }
        Ok(Self { year, month })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn month(self) -> u8 {
        self.month
    }

    pub fn next(self) -> Self {
        if self.month == 12 {
            Self {
                year: self.year + 1,
                month: 1,
            }
        } else {
            Self {
                year: self.year,
                month: self.month + 1,
            }
        }
    }

    /// Months elapsed since year 0, used to check grid spacing.
    fn ordinal(self) -> i64 {
        self.year as i64 * 12 + (self.month as i64 - 1)
    }

    /// `count` consecutive months starting at `self`.
    pub fn sequence(self, count: usize) -> Vec<YearMonth> {
        std::iter::successors(Some(self), |m| Some(m.next()))
            .take(count)
            .collect()
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for YearMonth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bytes = s.as_bytes();
        let well_formed = bytes.len() == 7
            && bytes[4] == b'-'
            && bytes[..4].iter().all(u8::is_ascii_digit)
            && bytes[5..].iter().all(u8::is_ascii_digit);
        if !well_formed {
            return Err(Error::InvalidArgument(format!("expected YYYY-MM, got {s:?}")));
        }
        let year: i32 = s[..4].parse().expect("four ascii digits");
        let month: u8 = s[5..].parse().expect("two ascii digits");
        YearMonth::new(year, month)
    }
}

/// Sector index levels on a shared monthly grid.
///
/// Levels are stored column-wise: `levels[i][t]` is sector `i` at month `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    sector_ids: Vec<String>,
    dates: Vec<YearMonth>,
    levels: Vec<Vec<f64>>,
}

impl Panel {
    /// Builds a panel, checking every invariant: at least four months and one
    /// sector, unique non-empty ids, consecutive months, positive finite levels.
    pub fn new(sector_ids: Vec<String>, dates: Vec<YearMonth>, levels: Vec<Vec<f64>>) -> Result<Self> {
        if sector_ids.is_empty() {
            return Err(Error::InvalidPanel("panel needs at least one sector".into()));
        }
        if dates.len() < MIN_MONTHS {
            return Err(Error::InvalidPanel(format!(
                "panel needs at least {MIN_MONTHS} months, got {}",
                dates.len()
            )));
        }
        let mut seen = HashSet::new();
        for id in &sector_ids {
            if id.is_empty() {
                return Err(Error::InvalidPanel("empty sector id".into()));
            }
            if !seen.insert(id.as_str()) {
                return Err(Error::InvalidPanel(format!("duplicate sector id {id:?}")));
            }
        }
        if levels.len() != sector_ids.len() {
            return Err(Error::InvalidPanel(format!(
                "{} sector ids but {} level columns",
                sector_ids.len(),
                levels.len()
            )));
        }
        for pair in dates.windows(2) {
            if pair[1].ordinal() != pair[0].ordinal() + 1 {
                return Err(Error::InvalidPanel(format!(
                    "month {} does not directly follow {}",
                    pair[1], pair[0]
                )));
            }
        }
        for (id, column) in sector_ids.iter().zip(&levels) {
            if column.len() != dates.len() {
                return Err(Error::InvalidPanel(format!(
                    "sector {id:?} has {} levels for {} months",
                    column.len(),
                    dates.len()
                )));
            }
            if let Some((t, v)) = column.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
                return Err(Error::InvalidPanel(format!(
                    "sector {id:?} month {}: level {v} is not a positive finite number",
                    dates[t]
                )));
            }
        }
        Ok(Self {
            sector_ids,
            dates,
            levels,
        })
    }

    pub fn sector_ids(&self) -> &[String] {
        &self.sector_ids
    }

    pub fn dates(&self) -> &[YearMonth] {
        &self.dates
    }

    /// Number of sectors (S).
    pub fn n_sectors(&self) -> usize {
        self.sector_ids.len()
    }

    /// Number of months (N).
    pub fn n_months(&self) -> usize {
        self.dates.len()
    }

    /// Level series of sector `i`.
    pub fn sector(&self, i: usize) -> &[f64] {
        &self.levels[i]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.levels
    }

    pub fn level(&self, month: usize, sector: usize) -> f64 {
        self.levels[sector][month]
    }
}

/// Closed window of oscillation periods, in months, kept by the band-pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandSpec {
    min_period: f64,
    max_period: f64,
}

impl BandSpec {
    pub fn new(min_period: f64, max_period: f64) -> Result<Self> {
        if !(min_period.is_finite() && max_period.is_finite()) {
            return Err(Error::InvalidBand("periods must be finite".into()));
        }
        if min_period < 2.0 {
            return Err(Error::InvalidBand(format!(
                "min_period {min_period} is below the two-sample Nyquist period"
            )));
        }
        if min_period >= max_period {
            return Err(Error::InvalidBand(format!(
                "min_period {min_period} must be strictly less than max_period {max_period}"
            )));
        }
        Ok(Self { min_period, max_period })
    }

    pub fn min_period(&self) -> f64 {
        self.min_period
    }

    pub fn max_period(&self) -> f64 {
        self.max_period
    }

    /// Checks that the band fits inside a record of `n_samples` months.
    pub fn validate_for(&self, n_samples: usize) -> Result<()> {
        if self.max_period > n_samples as f64 {
            return Err(Error::InvalidBand(format!(
                "max_period {} exceeds the record length of {n_samples} months",
                self.max_period
            )));
        }
        Ok(())
    }

    pub fn contains_period(&self, period: f64) -> bool {
        self.min_period <= period && period <= self.max_period
    }
}

impl Default for BandSpec {
    /// The 24 to 80 month business-cycle band.
    fn default() -> Self {
        Self {
            min_period: 24.0,
            max_period: 80.0,
        }
    }
}

impl fmt::Display for BandSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.min_period, self.max_period)
    }
}

impl FromStr for BandSpec {
    type Err = Error;

    /// Parses `MIN:MAX`.
    fn from_str(s: &str) -> Result<Self> {
        let (lo, hi) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidBand(format!("expected MIN:MAX, got {s:?}")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidBand(format!("{v:?} is not a number")))
        };
        BandSpec::new(parse(lo)?, parse(hi)?)
    }
}
