//! Synchronization analysis for panels of monthly time series.
//!
//! Index levels become log-returns, each sector is band-passed in the Fourier
//! domain and paired with its Hilbert transform, and the resulting
//! instantaneous phases are used to measure frequency entrainment, partial
//! phase locking, and common versus individual shocks. Synthetic generators
//! supply panels with known synchronization for validation.

pub mod analytic;
pub mod error;
pub mod io;
pub mod panel;
pub mod pipeline;
pub mod preprocess;
pub mod shocks;
pub mod synchrony;
pub mod synth;

pub use error::{Error, Result};
pub use panel::{BandSpec, Panel, YearMonth};
pub use pipeline::{analyze, AnalysisConfig, AnalysisReport};
