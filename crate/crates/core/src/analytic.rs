//! Discrete Fourier series, period-band truncation, Hilbert transform by
//! coefficient rotation, and instantaneous amplitude/phase.
//!
//! The record length `N` is the fundamental period, so harmonic `n` has a
//! period of `N / n` samples:
//!
//! ```text
//! x(t) = A0/2 + sum_n [ A_n cos(2 pi n t / N) + B_n sin(2 pi n t / N) ],  t = 0..N-1
//! ```
//!
//! Harmonics run over `1..=N/2`. For even `N` the Nyquist harmonic `N/2` has
//! only a cosine coefficient, stored at full weight so that the sum above
//! reconstructs the samples exactly.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::panel::BandSpec;

/// Shortest series accepted by [`fourier_forward`].
pub const MIN_SAMPLES: usize = 4;

/// `cos` and `sin` of `2 pi k / N` for `k = 0..N`.
struct TrigTable {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl TrigTable {
    fn new(n: usize) -> Self {
        let (cos, sin) = (0..n)
            .map(|k| {
                let a = TAU * k as f64 / n as f64;
                (a.cos(), a.sin())
            })
            .unzip();
        Self { cos, sin }
    }
}

/// Coefficients of the discrete Fourier series of an `n_samples`-long record.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierDecomposition {
    n_samples: usize,
    mean_term: f64,
    /// `A_n` at index `n - 1`.
    cos: Vec<f64>,
    /// `B_n` at index `n - 1`.
    sin: Vec<f64>,
}

impl FourierDecomposition {
    /// All-zero decomposition for a record of `n_samples`.
    pub fn zeros(n_samples: usize) -> Result<Self> {
        if n_samples < MIN_SAMPLES {
            return Err(Error::TooShort {
                required: MIN_SAMPLES,
                actual: n_samples,
            });
        }
        let h = n_samples / 2;
        Ok(Self {
            n_samples,
            mean_term: 0.0,
            cos: vec![0.0; h],
            sin: vec![0.0; h],
        })
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    /// `A0 / 2`, the series mean.
    pub fn mean_term(&self) -> f64 {
        self.mean_term
    }

    pub fn set_mean_term(&mut self, value: f64) {
        self.mean_term = value;
    }

    /// Highest harmonic index, `N / 2`.
    pub fn max_harmonic(&self) -> usize {
        self.cos.len()
    }

    fn is_nyquist(&self, n: usize) -> bool {
        self.n_samples.is_multiple_of(2) && n == self.n_samples / 2
    }

    /// `(A_n, B_n)` for `n` in `1..=N/2`.
    pub fn harmonic(&self, n: usize) -> (f64, f64) {
        assert!(n >= 1 && n <= self.max_harmonic(), "harmonic {n} out of range");
        (self.cos[n - 1], self.sin[n - 1])
    }

    /// Sets `(A_n, B_n)`. The Nyquist harmonic only takes a cosine part.
    pub fn set_harmonic(&mut self, n: usize, a: f64, b: f64) -> Result<()> {
        if n == 0 || n > self.max_harmonic() {
            return Err(Error::InvalidArgument(format!(
                "harmonic {n} outside 1..={}",
                self.max_harmonic()
            )));
        }
        if self.is_nyquist(n) && b != 0.0 {
            return Err(Error::InvalidArgument("the Nyquist harmonic has no sine part".into()));
        }
        self.cos[n - 1] = a;
        self.sin[n - 1] = b;
        Ok(())
    }

    /// Period of harmonic `n` in samples.
    pub fn period(&self, n: usize) -> f64 {
        self.n_samples as f64 / n as f64
    }

    /// Harmonic indices with any non-zero coefficient.
    pub fn active_harmonics(&self) -> Vec<usize> {
        (1..=self.max_harmonic())
            .filter(|&n| self.cos[n - 1] != 0.0 || self.sin[n - 1] != 0.0)
            .collect()
    }

    /// Mean of squares of the reconstructed series (Parseval).
    pub fn power(&self) -> f64 {
        let mut p = self.mean_term * self.mean_term;
        for n in 1..=self.max_harmonic() {
            let (a, b) = self.harmonic(n);
            p += if self.is_nyquist(n) {
                a * a
            } else {
                0.5 * (a * a + b * b)
            };
        }
        p
    }
}

/// Fourier coefficients of `series` by direct summation.
pub fn fourier_forward(series: &[f64]) -> Result<FourierDecomposition> {
    let n_samples = series.len();
    let mut dec = FourierDecomposition::zeros(n_samples)?;
    let trig = TrigTable::new(n_samples);
    let len = n_samples as f64;

    dec.mean_term = series.iter().sum::<f64>() / len;
    for n in 1..=dec.max_harmonic() {
        let (mut a, mut b) = (0.0, 0.0);
        for (t, x) in series.iter().enumerate() {
            let k = (n * t) % n_samples;
            a += x * trig.cos[k];
            b += x * trig.sin[k];
        }
        if dec.is_nyquist(n) {
            dec.cos[n - 1] = a / len;
            dec.sin[n - 1] = 0.0;
        } else {
            dec.cos[n - 1] = 2.0 * a / len;
            dec.sin[n - 1] = 2.0 * b / len;
        }
    }
    Ok(dec)
}

/// Evaluates the series at `t = 0..N-1`.
pub fn reconstruct(dec: &FourierDecomposition) -> Vec<f64> {
    let n_samples = dec.n_samples;
    let trig = TrigTable::new(n_samples);
    let active = dec.active_harmonics();
    (0..n_samples)
        .map(|t| {
            active.iter().fold(dec.mean_term, |acc, &n| {
                let k = (n * t) % n_samples;
                let (a, b) = dec.harmonic(n);
                // sin(pi t) is zero on the grid; skip the rounding residue of the table.
                let s = if dec.is_nyquist(n) { 0.0 } else { trig.sin[k] };
                acc + a * trig.cos[k] + b * s
            })
        })
        .collect()
}

/// Keeps exactly the harmonics whose period `N / n` lies in the closed band and
/// zeroes the mean term and everything else.
pub fn bandpass(dec: &FourierDecomposition, band: &BandSpec) -> Result<FourierDecomposition> {
    band.validate_for(dec.n_samples)?;
    let mut out = FourierDecomposition::zeros(dec.n_samples)?;
    let mut kept = 0;
    for n in 1..=dec.max_harmonic() {
        if band.contains_period(dec.period(n)) {
            out.cos[n - 1] = dec.cos[n - 1];
            out.sin[n - 1] = dec.sin[n - 1];
            kept += 1;
        }
    }
    if kept == 0 {
        return Err(Error::EmptyPassBand {
            n_samples: dec.n_samples,
            min_period: band.min_period(),
            max_period: band.max_period(),
        });
    }
    Ok(out)
}

/// Harmonic indices retained by [`bandpass`] for a record of `n_samples`.
pub fn passband_harmonics(n_samples: usize, band: &BandSpec) -> Vec<usize> {
    (1..=n_samples / 2)
        .filter(|&n| band.contains_period(n_samples as f64 / n as f64))
        .collect()
}

/// Quadrature rotation of the coefficients: `(A_n, B_n) -> (-B_n, A_n)`.
///
/// The mean maps to zero, as does the Nyquist harmonic, whose rotated
/// sine part vanishes on the sample grid.
pub fn hilbert_rotate(dec: &FourierDecomposition) -> FourierDecomposition {
    let mut out = dec.clone();
    out.mean_term = 0.0;
    for n in 1..=dec.max_harmonic() {
        let (a, b) = dec.harmonic(n);
        if dec.is_nyquist(n) {
            out.cos[n - 1] = 0.0;
            out.sin[n - 1] = 0.0;
        } else {
            out.cos[n - 1] = -b;
            out.sin[n - 1] = a;
        }
    }
    out
}

/// Hilbert transform of the series described by `dec`:
/// `y(t) = sum_n [A_n sin(2 pi n t / N) - B_n cos(2 pi n t / N)]`.
pub fn hilbert(dec: &FourierDecomposition) -> Vec<f64> {
    reconstruct(&hilbert_rotate(dec))
}

/// Maps an angle to `(-pi, pi]`.
pub fn wrap_phase(angle: f64) -> f64 {
    let mut w = angle.rem_euclid(TAU);
    if w > PI {
        w -= TAU;
    }
    w
}

/// Unwraps a phase sequence: each step is shifted by a multiple of `2 pi` so
/// that it lies in `(-pi, pi]`. The first sample is unchanged, and every
/// output differs from its input by an exact integer number of turns.
pub fn unwrap(phase_wrapped: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(phase_wrapped.len());
    let mut turns = 0.0_f64;
    let mut prev: Option<f64> = None;
    for &p in phase_wrapped {
        if let Some(q) = prev {
            let step = (p + TAU * turns) - q;
            turns -= ((step - PI) / TAU).ceil();
        }
        let u = p + TAU * turns;
        out.push(u);
        prev = Some(u);
    }
    out
}

/// Filtered series, its Hilbert pair, and the polar form of `x + i y`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticSeries {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub amplitude: Vec<f64>,
    /// In `(-pi, pi]`.
    pub phase_wrapped: Vec<f64>,
    pub phase_unwrapped: Vec<f64>,
}

impl AnalyticSeries {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Builds the analytic signal `z = x + i y` and extracts amplitude and phase.
///
/// A sample with `x = y = 0` has no phase; it inherits the previous sample's
/// phase. A zero first sample (including an all-zero series) is an error.
pub fn analytic(x: &[f64], y: &[f64]) -> Result<AnalyticSeries> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(format!(
            "real part has {} samples, imaginary part {}",
            x.len(),
            y.len()
        )));
    }
    if x.is_empty() {
        return Err(Error::TooShort { required: 1, actual: 0 });
    }
    let mut amplitude = Vec::with_capacity(x.len());
    let mut phase_wrapped = Vec::with_capacity(x.len());
    for (t, (&re, &im)) in x.iter().zip(y).enumerate() {
        amplitude.push(re.hypot(im));
        let phase = if re == 0.0 && im == 0.0 {
            match phase_wrapped.last() {
                Some(&p) => p,
                None if x.iter().zip(y).all(|(a, b)| *a == 0.0 && *b == 0.0) => {
                    return Err(Error::Degenerate("analytic signal is identically zero".into()))
                }
                None => {
                    return Err(Error::Degenerate(format!(
                        "phase undefined at sample {t}: zero amplitude with no previous phase"
                    )))
                }
            }
        } else {
            let p = im.atan2(re);
            // atan2 returns -pi for a negative-zero imaginary part.
            if p == -PI {
                PI
            } else {
                p
            }
        };
        phase_wrapped.push(phase);
    }
    let phase_unwrapped = unwrap(&phase_wrapped);
    Ok(AnalyticSeries {
        x: x.to_vec(),
        y: y.to_vec(),
        amplitude,
        phase_wrapped,
        phase_unwrapped,
    })
}

/// Band-passes `series` and returns its analytic signal.
pub fn analytic_in_band(series: &[f64], band: &BandSpec) -> Result<AnalyticSeries> {
    let filtered = bandpass(&fourier_forward(series)?, band)?;
    analytic(&reconstruct(&filtered), &hilbert(&filtered))
}
