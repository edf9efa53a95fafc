//! Frequency entrainment and phase-locking measures over a panel of phases.

use crate::error::{Error, Result};

/// Least-squares line `theta(t) = omega * t + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyFit {
    /// Radians per month.
    pub omega: f64,
    /// Radians.
    pub intercept: f64,
    /// Root-mean-square residual, radians.
    pub rms_residual: f64,
}

/// Fits a line through `(k * dt, phase[k])`.
pub fn fit_frequency(phase_unwrapped: &[f64], dt: f64) -> Result<FrequencyFit> {
    if phase_unwrapped.len() < 3 {
        return Err(Error::TooShort {
            required: 3,
            actual: phase_unwrapped.len(),
        });
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Degenerate(format!("time step {dt} must be positive and finite")));
    }
    let n = phase_unwrapped.len() as f64;
    let mean_t = dt * (n - 1.0) / 2.0;
    let mean_p = phase_unwrapped.iter().sum::<f64>() / n;
    let (mut stt, mut stp) = (0.0, 0.0);
    for (k, p) in phase_unwrapped.iter().enumerate() {
        let ct = k as f64 * dt - mean_t;
        stt += ct * ct;
        stp += ct * (p - mean_p);
    }
    let omega = stp / stt;
    let intercept = mean_p - omega * mean_t;
    let ss: f64 = phase_unwrapped
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let e = p - (omega * k as f64 * dt + intercept);
            e * e
        })
        .sum();
    Ok(FrequencyFit {
        omega,
        intercept,
        rms_residual: (ss / n).sqrt(),
    })
}

/// Cross-sector summary of fitted angular frequencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntrainmentSummary {
    pub mean_omega: f64,
    /// Population standard deviation.
    pub std_omega: f64,
    /// `(max - min) / mean`.
    pub relative_spread: f64,
}

pub fn entrainment_spread(fits: &[FrequencyFit]) -> Result<EntrainmentSummary> {
    if fits.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "entrainment needs at least 2 sectors, got {}",
            fits.len()
        )));
    }
    let n = fits.len() as f64;
    let mean_omega = fits.iter().map(|f| f.omega).sum::<f64>() / n;
    if mean_omega == 0.0 {
        return Err(Error::Degenerate("mean angular frequency is zero".into()));
    }
    let var = fits.iter().map(|f| (f.omega - mean_omega).powi(2)).sum::<f64>() / n;
    let (lo, hi) = fits.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), f| {
        (lo.min(f.omega), hi.max(f.omega))
    });
    Ok(EntrainmentSummary {
        mean_omega,
        std_omega: var.sqrt(),
        relative_spread: (hi - lo) / mean_omega,
    })
}

/// Time derivative of `theta(t) - omega * t`: central differences inside,
/// one-sided differences at both ends.
pub fn residual_velocity(phase_unwrapped: &[f64], omega: f64, dt: f64) -> Result<Vec<f64>> {
    let len = phase_unwrapped.len();
    if len < 3 {
        return Err(Error::TooShort {
            required: 3,
            actual: len,
        });
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Degenerate(format!("time step {dt} must be positive and finite")));
    }
    let r: Vec<f64> = phase_unwrapped
        .iter()
        .enumerate()
        .map(|(k, p)| p - omega * k as f64 * dt)
        .collect();
    let mut v = Vec::with_capacity(len);
    v.push((r[1] - r[0]) / dt);
    v.extend(r.windows(3).map(|w| (w[2] - w[0]) / (2.0 * dt)));
    v.push((r[len - 1] - r[len - 2]) / dt);
    Ok(v)
}

/// Phase-lock indicator traces.
#[derive(Debug, Clone, PartialEq)]
pub struct LockTrace {
    /// Month index of each sample (`k * dt`).
    pub times: Vec<f64>,
    /// Cross-sector mean residual phase velocity.
    pub mu: Vec<f64>,
    /// Cross-sector RMS deviation of residual velocities from `mu`.
    pub sigma: Vec<f64>,
    /// `sigma / mean(omega)`.
    pub lock_ratio: Vec<f64>,
}

impl LockTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Computes `mu(t)` and `sigma(t)` with `1/S` normalization.
///
/// A single sector is accepted: `mu` is its residual velocity and `sigma` is
/// zero. Callers that care should flag that case.
pub fn lock_indicator(phases: &[Vec<f64>], omegas: &[f64], dt: f64) -> Result<LockTrace> {
    if phases.is_empty() {
        return Err(Error::InvalidArgument("no sectors".into()));
    }
    if phases.len() != omegas.len() {
        return Err(Error::LengthMismatch(format!(
            "{} phase series but {} frequencies",
            phases.len(),
            omegas.len()
        )));
    }
    let len = phases[0].len();
    if let Some(p) = phases.iter().find(|p| p.len() != len) {
        return Err(Error::LengthMismatch(format!(
            "phase series of length {} alongside length {len}",
            p.len()
        )));
    }
    let s = phases.len() as f64;
    let mean_omega = omegas.iter().sum::<f64>() / s;
    if mean_omega == 0.0 || !mean_omega.is_finite() {
        return Err(Error::Degenerate(format!("mean angular frequency is {mean_omega}")));
    }

    let velocities = phases
        .iter()
        .zip(omegas)
        .map(|(p, &w)| residual_velocity(p, w, dt))
        .collect::<Result<Vec<_>>>()?;

    let mut mu = vec![0.0; len];
    let mut sigma = vec![0.0; len];
    for t in 0..len {
        let m = velocities.iter().map(|v| v[t]).sum::<f64>() / s;
        let var = velocities.iter().map(|v| (v[t] - m).powi(2)).sum::<f64>() / s;
        mu[t] = m;
        sigma[t] = var.sqrt();
    }
    let lock_ratio = sigma.iter().map(|v| v / mean_omega.abs()).collect();
    Ok(LockTrace {
        times: (0..len).map(|k| k as f64 * dt).collect(),
        mu,
        sigma,
        lock_ratio,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialLockSummary {
    /// Fraction of samples with `lock_ratio < threshold`.
    pub fraction_below: f64,
    pub is_partially_locked: bool,
}

/// Default `lock_ratio` threshold standing in for "sigma much smaller than omega".
pub const DEFAULT_LOCK_THRESHOLD: f64 = 0.1;
/// Default share of samples that must sit under the threshold.
pub const DEFAULT_LOCK_FRACTION: f64 = 0.9;

/// Partial phase locking holds when at least `required_fraction` of samples
/// have `lock_ratio < threshold`.
pub fn partial_lock_summary(trace: &LockTrace, threshold: f64, required_fraction: f64) -> Result<PartialLockSummary> {
    if !(threshold > 0.0 && threshold.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "lock threshold {threshold} must be positive"
        )));
    }
    if !(0.0..=1.0).contains(&required_fraction) {
        return Err(Error::InvalidArgument(format!(
            "required fraction {required_fraction} outside [0, 1]"
        )));
    }
    if trace.lock_ratio.is_empty() {
        return Err(Error::InvalidArgument("empty lock trace".into()));
    }
    let below = trace.lock_ratio.iter().filter(|&&r| r < threshold).count();
    let fraction_below = below as f64 / trace.lock_ratio.len() as f64;
    Ok(PartialLockSummary {
        fraction_below,
        is_partially_locked: fraction_below >= required_fraction,
    })
}
