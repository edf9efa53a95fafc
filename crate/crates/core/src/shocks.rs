//! Common and individual shocks from cross-sector phase averages.
//!
//! The common shock is `<cos theta(t)>`, the sector mean of the cosine of each
//! sector's phase. A sector's individual shock is its own `cos theta_i(t)` minus
//! that mean.

use crate::analytic::AnalyticSeries;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ShockDecomposition {
    pub times: Vec<f64>,
    pub mean_amplitude: Vec<f64>,
    pub common_shock: Vec<f64>,
    /// One sequence per sector, in panel order.
    pub individual: Vec<Vec<f64>>,
    /// Population standard deviation of the individual shocks at each time.
    /// Zero for a single-sector panel.
    pub dispersion: Vec<f64>,
}

fn common_len(analytic: &[AnalyticSeries]) -> Result<usize> {
    let first = analytic
        .first()
        .ok_or_else(|| Error::InvalidArgument("no sectors".into()))?;
    let len = first.len();
    if let Some(a) = analytic.iter().find(|a| a.len() != len) {
        return Err(Error::LengthMismatch(format!(
            "sector series of length {} alongside length {len}",
            a.len()
        )));
    }
    Ok(len)
}

fn cross_sector_mean(len: usize, count: usize, value: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    (0..len)
        .map(|t| (0..count).map(|i| value(i, t)).sum::<f64>() / count as f64)
        .collect()
}

/// `<A(t)>`, with each amplitude taken as the modulus `sqrt(x^2 + y^2)`.
pub fn mean_amplitude(analytic: &[AnalyticSeries]) -> Result<Vec<f64>> {
    let len = common_len(analytic)?;
    Ok(cross_sector_mean(len, analytic.len(), |i, t| {
        analytic[i].x[t].hypot(analytic[i].y[t])
    }))
}

/// `<cos theta(t)>` over the wrapped phases.
pub fn common_shock(analytic: &[AnalyticSeries]) -> Result<Vec<f64>> {
    let len = common_len(analytic)?;
    Ok(cross_sector_mean(len, analytic.len(), |i, t| {
        analytic[i].phase_wrapped[t].cos()
    }))
}

/// `cos theta_i(t) - common(t)` for every sector.
pub fn individual_shocks(analytic: &[AnalyticSeries], common: &[f64]) -> Result<Vec<Vec<f64>>> {
    let len = common_len(analytic)?;
    if common.len() != len {
        return Err(Error::LengthMismatch(format!(
            "common shock has {} samples, sectors have {len}",
            common.len()
        )));
    }
    Ok(analytic
        .iter()
        .map(|a| a.phase_wrapped.iter().zip(common).map(|(p, c)| p.cos() - c).collect())
        .collect())
}

/// Cross-sector population standard deviation at each time.
pub fn shock_dispersion(individual: &[Vec<f64>]) -> Result<Vec<f64>> {
    if individual.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "dispersion needs at least 2 sectors, got {}",
            individual.len()
        )));
    }
    let len = individual[0].len();
    if individual.iter().any(|v| v.len() != len) {
        return Err(Error::LengthMismatch("individual shock series differ in length".into()));
    }
    let s = individual.len() as f64;
    Ok((0..len)
        .map(|t| {
            let m = individual.iter().map(|v| v[t]).sum::<f64>() / s;
            (individual.iter().map(|v| (v[t] - m).powi(2)).sum::<f64>() / s).sqrt()
        })
        .collect())
}

/// Runs every step of the decomposition with sample times `k * dt`.
pub fn decompose(analytic: &[AnalyticSeries], dt: f64) -> Result<ShockDecomposition> {
    let len = common_len(analytic)?;
    let mean_amplitude = mean_amplitude(analytic)?;
    let common_shock = common_shock(analytic)?;
    let individual = individual_shocks(analytic, &common_shock)?;
    let dispersion = if individual.len() >= 2 {
        shock_dispersion(&individual)?
    } else {
        vec![0.0; len]
    };
    Ok(ShockDecomposition {
        times: (0..len).map(|k| k as f64 * dt).collect(),
        mean_amplitude,
        common_shock,
        individual,
        dispersion,
    })
}
